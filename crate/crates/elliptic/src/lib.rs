pub mod coxeter;
pub mod exactcore;
pub mod frobenius;
pub mod invariants;
pub mod rootsys;
pub mod series;
pub mod triplet;

pub type C64 = num_complex::Complex<f64>;
/// Double-double scalar (about 106 bits), the default working precision.
pub type DoubleDouble = twofloat::TwoFloat;
pub type QSeries64 = series::QSeries<f64>;
pub type QJet64 = series::QJet<f64>;
