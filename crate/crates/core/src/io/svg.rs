//! Minimal static SVG renderings.

use std::fmt::Write as _;

use crate::contour::PljContour;

const W: f64 = 640.0;
const H: f64 = 320.0;
const PAD: f64 = 30.0;

fn frame(body: &str, title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{PAD}\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">{title}</text>\n\
         <line x1=\"{PAD}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"#888\"/>\n\
         <line x1=\"{PAD}\" y1=\"{PAD}\" x2=\"{PAD}\" y2=\"{y0}\" stroke=\"#888\"/>\n\
         {body}</svg>\n",
        y0 = H - PAD,
        x1 = W - PAD,
    )
}

/// Contour drawn as falls, with jumps as dashed vertical strokes.
pub fn contour_svg(c: &PljContour, title: &str) -> String {
    let m = c.duration().max(f64::MIN_POSITIVE);
    let top = c.max_height().max(f64::MIN_POSITIVE);
    let sx = |t: f64| PAD + t / m * (W - 2.0 * PAD);
    let sy = |h: f64| H - PAD - h / top * (H - 2.0 * PAD);
    let mut body = String::new();
    let mut falls = String::new();
    let (mut t, mut h) = (0.0, 0.0);
    for p in c.prims() {
        let (t1, h1) = (t + p.duration(), h + p.delta());
        if p.duration() == 0.0 {
            writeln!(
                body,
                "<line x1=\"{x:.2}\" y1=\"{a:.2}\" x2=\"{x:.2}\" y2=\"{b:.2}\" stroke=\"#c33\" stroke-dasharray=\"3,3\"/>",
                x = sx(t),
                a = sy(h),
                b = sy(h1)
            )
            .unwrap();
        } else {
            write!(falls, "M{:.2},{:.2} L{:.2},{:.2} ", sx(t), sy(h), sx(t1), sy(h1)).unwrap();
        }
        t = t1;
        h = h1;
    }
    writeln!(body, "<path d=\"{falls}\" stroke=\"black\" fill=\"none\"/>").unwrap();
    frame(&body, title)
}

/// Empirical CDF of `sample` against a reference CDF.
pub fn ecdf_svg(sample: &[f64], cdf: impl Fn(f64) -> f64, title: &str) -> String {
    let mut xs: Vec<f64> = sample.iter().copied().filter(|x| x.is_finite()).collect();
    xs.sort_by(f64::total_cmp);
    if xs.is_empty() {
        return frame("", title);
    }
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let sx = |x: f64| PAD + (x - lo) / span * (W - 2.0 * PAD);
    let sy = |p: f64| H - PAD - p * (H - 2.0 * PAD);
    let n = xs.len() as f64;
    let mut emp = format!("M{:.2},{:.2} ", sx(lo), sy(0.0));
    for (k, &x) in xs.iter().enumerate() {
        write!(
            emp,
            "L{:.2},{:.2} L{:.2},{:.2} ",
            sx(x),
            sy(k as f64 / n),
            sx(x),
            sy((k + 1) as f64 / n)
        )
        .unwrap();
    }
    let mut theo = String::new();
    for k in 0..=200 {
        let x = lo + span * k as f64 / 200.0;
        let cmd = if k == 0 { 'M' } else { 'L' };
        write!(theo, "{cmd}{:.2},{:.2} ", sx(x), sy(cdf(x).clamp(0.0, 1.0))).unwrap();
    }
    let body = format!(
        "<path d=\"{emp}\" stroke=\"black\" fill=\"none\"/>\n<path d=\"{theo}\" stroke=\"#36c\" fill=\"none\"/>\n"
    );
    frame(&body, title)
}
