//! Numerical laboratory for fractional dissipative active scalars
//! `θ_t = (u·∇)θ − (−Δ)^α θ` with the Burgers (`u = θ`), CCF (`u = Hθ`),
//! SQG (`u = ∇⊥(−Δ)^{−1/2}θ`) and β-SQG velocity laws.
//!
//! The crate has three layers:
//!
//! * moduli of continuity and the nonlocal maximum principle certifier
//!   ([`moduli`], [`nmp`]) — evaluates the dissipation functional
//!   `D_{α,ω}` and flow majorants `Ω_ω` by adaptive quadrature and checks
//!   the strict inequality `Ω·∂ξω + D_{α,ω} < 0` over log grids;
//! * periodic pseudospectral evolution with run-time diagnostics
//!   ([`spectral`], [`solver`]) and the exact Burgers/diffusion time
//!   splitting ([`splitting`], [`kernel`]);
//! * the blow-up constructions: barrier recursion and ODE system for
//!   supercritical Burgers ([`blowup`]), the `J(t)` functional and
//!   singular-integral inequality harness for CCF ([`ccf`]), and the
//!   rough-data decay schedules ([`rough`]).



pub mod error;


pub mod moduli;
pub mod nmp;
pub mod quad;
pub mod ccf;
pub mod solver;
pub mod spectral;





pub use error::CoreError;
pub use moduli::{ModulusSpec, ScaledModulus, TimeDependentModulus};


