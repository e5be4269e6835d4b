use std::fmt;

/// CSV number: plain decimal in [1e-4, 1e15), exponent form outside, and
/// no negative zero.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Num(pub f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = if self.0 == 0.0 { 0.0 } else { self.0 };
        let a = v.abs();
        if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
            write!(f, "{v}")
        } else {
            write!(f, "{v:e}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::Num;

    #[test]
    fn formats() {
        assert_eq!(Num(-0.0).to_string(), "0");
        assert_eq!(Num(2.0).to_string(), "2");
        assert_eq!(Num(0.25).to_string(), "0.25");
        assert_eq!(Num(4.4e-16).to_string(), "4.4e-16");
        assert_eq!(Num(-3e20).to_string(), "-3e20");
        assert_eq!(Num(f64::NAN).to_string(), "NaN");
    }
}
