//! CSV formatting and the SVG rendering of sweeps.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::phase::{SweepFailure, SweepRecord};

pub const SWEEP_COLUMNS: &str = "n_sites,m,d,t0,tb,T_b,gamma_c,Gamma_c,n_complex_above,bracket_width";

/// 12 significant digits, scientific notation.
pub fn format_number(x: f64) -> String {
    format!("{x:.11e}")
}

/// Header row and one row per entry; failed points keep their coordinates,
/// leave the result columns empty and are followed by a `# failed` line.
pub(crate) fn write_sweep_table(text: &mut String, rows: &[Result<&SweepRecord, &SweepFailure>]) {
    text.push_str(SWEEP_COLUMNS);
    text.push('\n');
    for row in rows {
        match row {
            Ok(r) => {
                let _ = writeln!(
                    text,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.n_sites,
                    r.impurity_site,
                    r.distance,
                    format_number(r.t0),
                    format_number(r.tb),
                    format_number(r.tb_ratio),
                    format_number(r.gamma_c),
                    format_number(r.gamma_c_ratio),
                    r.n_complex_above,
                    format_number(r.bracket_width)
                );
            }
            Err(f) => {
                let _ = writeln!(
                    text,
                    "{},{},{},{},{},{},,,,",
                    f.n_sites,
                    (f.n_sites + 1 - f.distance) / 2,
                    f.distance,
                    format_number(f.t0),
                    format_number(f.tb),
                    format_number(f.tb / f.t0)
                );
                let _ = writeln!(text, "# failed d={} tb={}: {}", f.distance, format_number(f.tb), f.message);
            }
        }
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 110.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64> + Clone, log: bool) -> Self {
        let t = |v: f64| if log { v.log10() } else { v };
        let lo = values.clone().map(t).fold(f64::INFINITY, f64::min);
        let hi = values.map(t).fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if log {
            (lo.floor(), hi.ceil().max(lo.floor() + 1.0))
        } else {
            let lo = lo.min(0.0);
            (lo, if hi > lo { hi } else { lo + 1.0 })
        };
        Axis { log, lo, hi }
    }

    /// Position in `[0, 1]`.
    fn frac(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    /// Tick values in data units.
    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let step = ((self.hi - self.lo) / 8.0).ceil().max(1.0);
            let mut out = Vec::new();
            let mut e = self.lo;
            while e <= self.hi + 1e-9 {
                out.push(10f64.powf(e));
                e += step;
            }
            out
        } else {
            let raw = (self.hi - self.lo) / 5.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0].iter().map(|f| f * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
            let first = (self.lo / step).ceil() as i64;
            let last = (self.hi / step).floor() as i64;
            (first..=last).map(|k| k as f64 * step).collect()
        }
    }

    fn label(&self, v: f64) -> String {
        if self.log {
            format!("1e{}", v.log10().round() as i64)
        } else {
            let s = format!("{v:.3}");
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        }
    }
}

/// Self-contained SVG of `Γ_c` against `T_b`, one polyline per distance.
/// Log-log when every `T_b < 1`, linear otherwise.
pub fn sweep_svg(records: &[SweepRecord]) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let usable: Vec<&SweepRecord> = records.iter().filter(|r| r.gamma_c_ratio > 0.0 && r.tb_ratio > 0.0).collect();
    if usable.is_empty() {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">no data</text>"#, WIDTH / 2.0, HEIGHT / 2.0);
        svg.push_str("</svg>\n");
        return svg;
    }

    let log = usable.iter().all(|r| r.tb_ratio < 1.0);
    let xa = Axis::new(usable.iter().map(|r| r.tb_ratio), log);
    let ya = Axis::new(usable.iter().map(|r| r.gamma_c_ratio), log);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| LEFT + pw * xa.frac(v);
    let py = |v: f64| TOP + ph * (1.0 - ya.frac(v));

    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>"##
    );
    for t in xa.ticks() {
        let x = px(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{y1}" stroke="#000"/><text x="{x:.2}" y="{ty}" text-anchor="middle">{}</text>"##,
            xa.label(t),
            y0 = TOP + ph,
            y1 = TOP + ph - 5.0,
            ty = TOP + ph + 18.0
        );
    }
    for t in ya.ticks() {
        let y = py(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#000"/><text x="{tx}" y="{ty:.2}" text-anchor="end">{}</text>"##,
            ya.label(t),
            x1 = LEFT + 5.0,
            tx = LEFT - 8.0,
            ty = y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">T_b</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{y}" text-anchor="middle" font-size="14" transform="rotate(-90 20 {y})">Γ_c</text>"#,
        y = TOP + ph / 2.0
    );

    let mut series: BTreeMap<usize, Vec<&SweepRecord>> = BTreeMap::new();
    for r in usable {
        series.entry(r.distance).or_default().push(r);
    }
    for (k, (d, mut pts)) in series.into_iter().enumerate() {
        pts.sort_by(|a, b| a.tb_ratio.total_cmp(&b.tb_ratio));
        let color = COLORS[k % COLORS.len()];
        let coords: Vec<String> =
            pts.iter().map(|r| format!("{:.2},{:.2}", px(r.tb_ratio), py(r.gamma_c_ratio))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        for r in &pts {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                px(r.tb_ratio),
                py(r.gamma_c_ratio)
            );
        }
        let ly = TOP + 20.0 + 18.0 * k as f64;
        let lx = LEFT + pw + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">d = {d}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(d: usize, tb: f64, gc: f64) -> SweepRecord {
        SweepRecord {
            n_sites: 20,
            impurity_site: (21 - d) / 2,
            distance: d,
            t0: 1.0,
            tb,
            tb_ratio: tb,
            gamma_c: gc,
            gamma_c_ratio: gc,
            n_complex_above: 2,
            bracket_width: 1e-10,
        }
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(0.7), "7.00000000000e-1");
        assert_eq!(format_number(-1234.5), "-1.23450000000e3");
    }

    #[test]
    fn log_axis_spans_whole_decades() {
        let a = Axis::new([0.05, 0.3].into_iter(), true);
        assert_eq!((a.lo, a.hi), (-2.0, 0.0));
        assert_eq!(a.ticks().len(), 3);
    }

    #[test]
    fn svg_has_one_series_per_distance() {
        let recs = vec![record(1, 0.1, 0.1), record(1, 0.2, 0.2), record(3, 0.1, 0.001), record(3, 0.2, 0.008)];
        let svg = sweep_svg(&recs);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("d = 3") && svg.contains("T_b") && svg.contains("Γ_c"));
        assert!(!svg.contains("href"));
    }
}
