//! Height quantization.
//!
//! Every height stored in a tree, contour or exact path lives on the dyadic
//! grid `k * 2^-32` with `|k| < 2^52`. On that grid f64 addition and
//! subtraction are exact, which is what makes the codec identities
//! (`encode`/`decode`, truncation versus time change, excursion synthesis)
//! hold bit for bit instead of up to rounding.

/// Absolute tolerance for height and time equality.
pub const EPS: f64 = 1e-9;

/// Grid resolution, 2^-32.
pub const QUANTUM: f64 = 1.0 / 4_294_967_296.0;

/// Largest supported height, 2^20. Beyond this grid sums stop being exact.
pub const MAX_HEIGHT: f64 = 1_048_576.0;

const SCALE: f64 = 4_294_967_296.0;

/// Rounds `x` to the nearest grid point.
#[inline]
pub fn quantize(x: f64) -> f64 {
    (x * SCALE).round() / SCALE
}

#[inline]
pub fn on_grid(x: f64) -> bool {
    quantize(x) == x
}

/// Formats a float with 17 significant digits, enough to reparse the same bits.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let s = format!("{x:.16e}");
    // `1.5000000000000000e0` -> `1.5e0`; keeps the text exact but shorter.
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
            if exp == "0" {
                mantissa.to_string()
            } else {
                format!("{mantissa}e{exp}")
            }
        }
        None => s,
    }
}
