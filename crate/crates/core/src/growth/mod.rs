//! Ball censuses and what can be read off them.

pub mod ball;
pub mod distortion;
pub mod entropy;
pub mod fit;
pub mod sandwich;

pub use ball::{
    element_length, enumerate_ball, enumerate_ball_elements, enumerate_closure, Ball, BallCensus, Caps,
    Closure, ElementLength,
};
pub use distortion::{distortion_profile, DistortionProfile, Subgroup};
pub use entropy::{entropy_report, Classification, EntropyReport};
pub use fit::{fit_exponential_rate, fit_polynomial_degree, ExponentialFit, PolynomialBoundFit};
pub use sandwich::{quotient_sandwich_check, SandwichReport};
