//! Exact rational helpers.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Q = Ratio<i64>;

pub fn q(n: u64) -> Q {
    Q::from_integer(n as i64)
}

pub fn frac(n: u64, d: u64) -> Q {
    Q::new(n as i64, d as i64)
}

/// Largest integer not above `x`.
pub fn floor(x: Q) -> i64 {
    x.numer().div_floor(x.denom())
}

/// `p/q` with six decimal places, e.g. `5/3 (1.666667)`.
pub fn show(x: Q) -> String {
    format!("{} ({})", x, decimal(x))
}

/// Decimal expansion rounded half away from zero to six places.
pub fn decimal(x: Q) -> String {
    let scaled = x * Q::from_integer(1_000_000);
    let half = Q::new(1, 2);
    let r = if scaled.is_negative() {
        -((-scaled + half).floor())
    } else {
        (scaled + half).floor()
    };
    let n = r.to_integer();
    let sign = if n < 0 { "-" } else { "" };
    let a = n.unsigned_abs();
    format!("{}{}.{:06}", sign, a / 1_000_000, a % 1_000_000)
}

/// Lossy conversion for display in places where a float is expected.
pub fn approx(x: Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn is_zero(x: Q) -> bool {
    x.is_zero()
}
