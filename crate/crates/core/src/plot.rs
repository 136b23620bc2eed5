//! Static SVG rendering of a sweep table: attenuation against the swept
//! variable, one curve per humidity.
//!
//! Each `<polyline>` carries the exact CSV values it was drawn from in its
//! `data-x` / `data-y` attributes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;

use crate::error::{Error, Result};
use crate::sweep::{format_number, read_sweep_csv, SweepRow};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// Which CSV column the sweep ran over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Visibility,
    ParticleRadius,
    Frequency,
    Humidity,
    /// None of the input columns vary (distance sweeps); plot against row index.
    Index,
}

impl Axis {
    fn label(self) -> &'static str {
        match self {
            Axis::Visibility => "visibility (km)",
            Axis::ParticleRadius => "particle radius (um)",
            Axis::Frequency => "frequency (GHz)",
            Axis::Humidity => "relative humidity (%)",
            Axis::Index => "sweep point",
        }
    }

    fn value(self, row: &SweepRow, index: usize) -> f64 {
        match self {
            Axis::Visibility => row.visibility_km,
            Axis::ParticleRadius => row.particle_radius_um,
            Axis::Frequency => row.frequency_ghz,
            Axis::Humidity => row.humidity_pct,
            Axis::Index => index as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub axis: Axis,
    pub log_x: bool,
    pub log_y: bool,
    pub curves: Vec<Curve>,
}

fn distinct(values: impl Iterator<Item = f64>) -> usize {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

fn is_geometric(xs: &[f64]) -> bool {
    if xs.len() < 3 || xs.iter().any(|&x| x <= 0.0) {
        return false;
    }
    let r0 = xs[1] / xs[0];
    r0 > 1.0 + 1e-9 && xs.windows(2).all(|w| ((w[1] / w[0]) / r0 - 1.0).abs() < 1e-6)
}

fn no_data(msg: &str) -> Error {
    Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, msg.to_string()))
}

/// Groups sweep rows into curves.
pub fn figure_from_rows(rows: &[SweepRow]) -> Result<Figure> {
    if rows.is_empty() {
        return Err(no_data("sweep table has no data rows"));
    }
    let candidates = [
        (Axis::Visibility, distinct(rows.iter().map(|r| r.visibility_km))),
        (Axis::ParticleRadius, distinct(rows.iter().map(|r| r.particle_radius_um))),
        (Axis::Frequency, distinct(rows.iter().map(|r| r.frequency_ghz))),
    ];
    let humidity_levels = distinct(rows.iter().map(|r| r.humidity_pct));
    let axis = match candidates.iter().filter(|c| c.1 > 1).max_by_key(|c| c.1) {
        Some(&(axis, _)) => axis,
        // A humidity sweep never repeats humidity on consecutive rows; a
        // distance sweep over a humidity list always does.
        None if humidity_levels > 1 && rows.windows(2).all(|w| w[0].humidity_pct != w[1].humidity_pct) => {
            Axis::Humidity
        }
        None => Axis::Index,
    };

    let mut groups: BTreeMap<(String, String, u64), Curve> = BTreeMap::new();
    let mut order: Vec<(String, String, u64)> = Vec::new();
    let mut counters: BTreeMap<(String, String, u64), usize> = BTreeMap::new();
    for row in rows {
        let h_key = if axis == Axis::Humidity { 0 } else { row.humidity_pct.to_bits() };
        let key = (row.band.clone(), row.scenario.name().to_string(), h_key);
        let idx = counters.entry(key.clone()).or_insert(0);
        let x = axis.value(row, *idx);
        *idx += 1;
        let curve = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            let label = if axis == Axis::Humidity {
                format!("{} {}", row.band, row.scenario)
            } else {
                format!("{} {} H = {}%", row.band, row.scenario, format_number(row.humidity_pct))
            };
            Curve { label, x: Vec::new(), y: Vec::new() }
        });
        curve.x.push(x);
        curve.y.push(row.attenuation_db_per_km);
    }
    let curves: Vec<Curve> = order.into_iter().filter_map(|k| groups.remove(&k)).collect();

    let log_x = curves.iter().all(|c| is_geometric(&c.x));
    let ys = curves.iter().flat_map(|c| c.y.iter().copied());
    let (ymin, ymax) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    let log_y = ymin > 0.0 && ymax / ymin > 100.0;
    Ok(Figure { axis, log_x, log_y, curves })
}

pub fn figure_from_csv<R: Read>(input: R) -> Result<Figure> {
    figure_from_rows(&read_sweep_csv(input)?)
}

struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
    px_lo: f64,
    px_hi: f64,
}

impl Scale {
    fn new(values: impl Iterator<Item = f64>, log: bool, px_lo: f64, px_hi: f64) -> Self {
        let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if log {
            lo = 10f64.powf(lo.log10().floor());
            hi = 10f64.powf(hi.log10().ceil());
        }
        if hi <= lo {
            let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
            lo -= pad;
            hi += pad;
        }
        Self { lo, hi, log, px_lo, px_hi }
    }

    fn t(&self, v: f64) -> f64 {
        if self.log {
            (v.log10() - self.lo.log10()) / (self.hi.log10() - self.lo.log10())
        } else {
            (v - self.lo) / (self.hi - self.lo)
        }
    }

    fn px(&self, v: f64) -> f64 {
        self.px_lo + self.t(v) * (self.px_hi - self.px_lo)
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.log10().round() as i32, self.hi.log10().round() as i32);
            return (a..=b).map(|e| 10f64.powi(e)).collect();
        }
        let range = self.hi - self.lo;
        let mag = 10f64.powf((range / 8.0).log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| range / s <= 8.0)
            .unwrap_or(10.0 * mag);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last).map(|i| i as f64 * step).collect()
    }
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e5) {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|&v| format_number(v)).collect::<Vec<_>>().join(" ")
}

pub fn render_svg(fig: &Figure) -> String {
    let plot_right = WIDTH - RIGHT;
    let plot_bottom = HEIGHT - BOTTOM;
    let xs = Scale::new(fig.curves.iter().flat_map(|c| c.x.iter().copied()), fig.log_x, LEFT, plot_right);
    let ys = Scale::new(fig.curves.iter().flat_map(|c| c.y.iter().copied()), fig.log_y, plot_bottom, TOP);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
        plot_right - LEFT,
        plot_bottom - TOP
    );

    for t in xs.ticks() {
        let x = xs.px(t);
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{plot_bottom}" x2="{x:.2}" y2="{TOP}" stroke="#ddd"/>"##);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            plot_bottom + 16.0,
            tick_label(t)
        );
    }
    for t in ys.ticks() {
        let y = ys.px(t);
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{plot_right}" y2="{y:.2}" stroke="#ddd"/>"##);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (LEFT + plot_right) / 2.0,
        HEIGHT - 16.0,
        fig.axis.label()
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">attenuation (dB/km)</text>"#,
        (TOP + plot_bottom) / 2.0,
        (TOP + plot_bottom) / 2.0
    );

    for (i, c) in fig.curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        // Points that cannot sit on a log axis are left out of the drawing
        // but kept in the data attributes.
        let points: Vec<String> = c
            .x
            .iter()
            .zip(&c.y)
            .filter(|(x, y)| (!fig.log_x || **x > 0.0) && (!fig.log_y || **y > 0.0))
            .map(|(&x, &y)| format!("{:.2},{:.2}", xs.px(x), ys.px(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="curve" fill="none" stroke="{color}" stroke-width="1.5" data-label="{}" data-x="{}" data-y="{}" points="{}"/>"#,
            c.label,
            join(&c.x),
            join(&c.y),
            points.join(" ")
        );
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            plot_right + 10.0,
            plot_right + 30.0
        );
        let _ = writeln!(
            s,
            r#"<text class="legend" x="{:.2}" y="{:.2}">{}</text>"#,
            plot_right + 36.0,
            ly + 4.0,
            c.label
        );
    }
    s.push_str("</svg>\n");
    s
}
