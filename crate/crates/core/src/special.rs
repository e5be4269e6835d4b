//! Exponential integrals used by the Ohmic bath correlation function.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral E1(x) for x > 0.
pub fn e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 requires x > 0");
    if x <= 1.0 {
        e1_series(x)
    } else {
        scaled_e1_cf(x) * (-x).exp()
    }
}

/// Exponential integral Ei(x) for x > 0.
pub fn ei(x: f64) -> f64 {
    assert!(x > 0.0, "Ei requires x > 0");
    if x < 40.0 {
        ei_series(x)
    } else {
        scaled_ei_asymptotic(x) * x.exp()
    }
}

/// e^{-x} Ei(x) - e^{x} E1(x), evaluated without overflow and without the
/// cancellation that hits the naive difference at large x.
pub fn ei_e1_difference(x: f64) -> f64 {
    assert!(x > 0.0);
    if x >= 40.0 {
        // 2 * sum over odd k of k!/x^{k+1}
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        let mut term = inv2;
        let mut sum = 0.0f64;
        let mut k = 1.0;
        while term.abs() > 1e-18 * sum.abs() && k < 60.0 {
            sum += term;
            term *= (k + 1.0) * (k + 2.0) * inv2;
            k += 2.0;
        }
        2.0 * sum
    } else {
        let scaled_e1 = if x <= 1.0 {
            e1_series(x) * x.exp()
        } else {
            scaled_e1_cf(x)
        };
        ei_series(x) * (-x).exp() - scaled_e1
    }
}

fn e1_series(x: f64) -> f64 {
    // E1 = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -x / kf;
        let add = term / kf;
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

fn ei_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..400 {
        let kf = k as f64;
        term *= x / kf;
        let add = term / kf;
        sum += add;
        if add < 1e-17 * sum {
            break;
        }
    }
    EULER_GAMMA + x.ln() + sum
}

/// e^{x} E1(x) by the modified Lentz continued fraction, x > 1.
fn scaled_e1_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

fn scaled_ei_asymptotic(x: f64) -> f64 {
    let inv = 1.0 / x;
    let mut term = inv;
    let mut sum = 0.0;
    let mut k = 0.0;
    loop {
        sum += term;
        let next = term * (k + 1.0) * inv;
        if next.abs() < 1e-18 * sum || next.abs() > term.abs() {
            break;
        }
        term = next;
        k += 1.0;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // reference values from mpmath at 30 digits
    #[test]
    fn e1_reference_values() {
        assert!(rel(e1(0.1), 1.822_923_958_419_390_6) < 1e-14);
        assert!(rel(e1(1.0), 0.219_383_934_395_520_27) < 1e-14);
        assert!(rel(e1(2.5), 0.024_914_917_870_269_736) < 1e-13);
        assert!(rel(e1(10.0), 4.156_968_929_685_324e-6) < 1e-13);
    }

    #[test]
    fn ei_reference_values() {
        assert!(rel(ei(0.1), -1.622_812_813_969_276_6) < 1e-14);
        assert!(rel(ei(1.0), 1.895_117_816_355_936_8) < 1e-14);
        assert!(rel(ei(10.0), 2_492.228_976_241_877_8) < 1e-13);
        assert!(rel(ei(50.0), 1.058_563_689_713_169_1e20) < 1e-12);
    }

    #[test]
    fn difference_is_continuous_across_branch() {
        let below = ei_e1_difference(40.0 - 1e-9);
        let above = ei_e1_difference(40.0);
        assert!(rel(below, above) < 1e-10);
        // leading asymptotics 2/x^2
        let x = 1e4;
        assert!(rel(ei_e1_difference(x), 2.0 / (x * x)) < 1e-6);
    }
}
