//! Parameter sweeps, margin reports and threshold tables, with their CSV
//! encodings.
//!
//! Points are evaluated through [`crate::par::map_ordered`], so rows come
//! out in configuration order whatever the thread count. Random shadowing
//! is drawn up front, one draw per row in row order.

use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::config::{radius_m_from_um, radius_um_from_m, Run, SweepVariable};
use crate::error::{invalid, Error, Result};
use crate::linkbudget::{noise_power_dbm, system_noise_temperature, Band, LinkModel, LinkReport, Threshold};
use crate::par;
use crate::pathloss::{LinkGeometry, Scenario, ScenarioKind};

pub const SWEEP_HEADER: [&str; 12] = [
    "band",
    "scenario",
    "humidity_pct",
    "height_m",
    "visibility_km",
    "particle_radius_um",
    "frequency_ghz",
    "attenuation_db_per_km",
    "baseline_loss_db",
    "modified_loss_db",
    "margin_db",
    "link_ok",
];

pub const THRESHOLD_HEADER: [&str; 5] = [
    "band",
    "scenario",
    "humidity_pct",
    "critical_visibility_km",
    "critical_particle_radius_um",
];

pub const FRONTIER_HEADER: [&str; 5] = [
    "band",
    "scenario",
    "humidity_pct",
    "visibility_km",
    "critical_particle_radius_um",
];

pub const NO_FAILURE: &str = "no-failure";

/// One evaluated point of the pipeline. Sizes are in the CSV's units.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub band: String,
    pub scenario: ScenarioKind,
    pub humidity_pct: f64,
    pub height_m: f64,
    pub visibility_km: f64,
    pub particle_radius_um: f64,
    pub frequency_ghz: f64,
    pub attenuation_db_per_km: f64,
    pub baseline_loss_db: f64,
    pub modified_loss_db: f64,
    pub margin_db: f64,
    pub link_ok: bool,
}

#[derive(Debug, Clone, Copy)]
struct Point {
    humidity_pct: f64,
    value: f64,
    shadow_db: f64,
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_number(x: f64) -> String {
    format!("{x}")
}

fn model_for(run: &Run, geometry: LinkGeometry, scenario: Scenario) -> LinkModel {
    LinkModel {
        radio: run.radio,
        scenario,
        geometry,
        dust_mode: run.dust_mode,
        mie: run.mie,
    }
}

/// Evaluates the pipeline with one sweep variable set to `value` (in CSV units).
pub fn evaluate_point(run: &Run, variable: SweepVariable, value: f64, humidity_pct: f64, shadow_db: f64) -> Result<SweepRow> {
    let mut storm = run.storm;
    let mut geometry = run.geometry;
    let mut humidity = humidity_pct;
    match variable {
        SweepVariable::Visibility => storm.reference_visibility_km = value,
        SweepVariable::ParticleRadius => storm.particle_radius_m = radius_m_from_um(value),
        SweepVariable::Frequency => geometry.frequency_ghz = value,
        SweepVariable::Distance => geometry.distance_m = value,
        SweepVariable::Humidity => humidity = value,
    }
    storm.humidity_pct = humidity;
    let eps = run.humidity_model.permittivity(humidity)?;
    let model = model_for(run, geometry, run.scenario.with_shadowing_draw(shadow_db));
    let report = model.evaluate(&storm, eps);
    Ok(SweepRow {
        band: run.band_label.clone(),
        scenario: run.scenario.kind,
        humidity_pct: humidity,
        height_m: storm.height_m,
        visibility_km: storm.reference_visibility_km,
        particle_radius_um: radius_um_from_m(storm.particle_radius_m),
        frequency_ghz: geometry.frequency_ghz,
        attenuation_db_per_km: report.dust_attenuation_db_per_km,
        baseline_loss_db: report.baseline_loss_db,
        modified_loss_db: report.modified_loss_db,
        margin_db: report.margin_db,
        link_ok: report.link_ok,
    })
}

fn sweep_points(run: &Run) -> Vec<Point> {
    let values = run.sweep.values();
    let humidities: Vec<f64> = if run.sweep.variable == SweepVariable::Humidity {
        vec![f64::NAN]
    } else {
        run.humidity.clone()
    };
    let n = humidities.len() * values.len();
    let draws = run.shadowing.draws(run.seed, n);
    humidities
        .iter()
        .flat_map(|&h| values.iter().map(move |&v| (h, v)))
        .zip(draws)
        .map(|((h, v), shadow_db)| Point {
            humidity_pct: h,
            value: v,
            shadow_db,
        })
        .collect()
}

/// One row per (humidity, sweep value), humidity-major.
pub fn run_attenuation_sweep(run: &Run) -> Result<Vec<SweepRow>> {
    let points = sweep_points(run);
    par::map_ordered(&points, |p| {
        evaluate_point(run, run.sweep.variable, p.value, p.humidity_pct, p.shadow_db)
    })
    .into_iter()
    .collect()
}

/// Single-threaded [`run_attenuation_sweep`].
pub fn run_attenuation_sweep_sequential(run: &Run) -> Result<Vec<SweepRow>> {
    let points = sweep_points(run);
    par::map_sequential(&points, |p| {
        evaluate_point(run, run.sweep.variable, p.value, p.humidity_pct, p.shadow_db)
    })
    .into_iter()
    .collect()
}

fn bool_str(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn sweep_record(r: &SweepRow) -> [String; 12] {
    [
        r.band.clone(),
        r.scenario.name().to_string(),
        format_number(r.humidity_pct),
        format_number(r.height_m),
        format_number(r.visibility_km),
        format_number(r.particle_radius_um),
        format_number(r.frequency_ghz),
        format_number(r.attenuation_db_per_km),
        format_number(r.baseline_loss_db),
        format_number(r.modified_loss_db),
        format_number(r.margin_db),
        bool_str(r.link_ok).to_string(),
    ]
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    write_sweep_rows(rows, out, true)
}

/// Writes rows, with the header only when `header` is set (for appending).
pub fn write_sweep_rows<W: Write>(rows: &[SweepRow], out: W, header: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if header {
        w.write_record(SWEEP_HEADER)?;
    }
    for r in rows {
        w.write_record(sweep_record(r))?;
    }
    w.flush()?;
    Ok(())
}

fn bad_data(msg: String) -> Error {
    Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, msg))
}

fn parse_f64(field: &str, column: &str, line: u64) -> Result<f64> {
    field
        .parse()
        .map_err(|_| bad_data(format!("line {line}: column {column}: `{field}` is not a number")))
}

/// Parses a sweep CSV. Malformed input is reported as an I/O error.
pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(SWEEP_HEADER.iter().copied()) {
        return Err(bad_data(format!(
            "not a sweep table: header is `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize| parse_f64(&rec[i], SWEEP_HEADER[i], line);
        rows.push(SweepRow {
            band: rec[0].to_string(),
            scenario: rec[1]
                .parse()
                .map_err(|e: Error| bad_data(format!("line {line}: {e}")))?,
            humidity_pct: num(2)?,
            height_m: num(3)?,
            visibility_km: num(4)?,
            particle_radius_um: num(5)?,
            frequency_ghz: num(6)?,
            attenuation_db_per_km: num(7)?,
            baseline_loss_db: num(8)?,
            modified_loss_db: num(9)?,
            margin_db: num(10)?,
            link_ok: match &rec[11] {
                "true" => true,
                "false" => false,
                other => return Err(bad_data(format!("line {line}: link_ok: `{other}`"))),
            },
        });
    }
    Ok(rows)
}

/// A margin report for one humidity.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginReport {
    pub row: SweepRow,
    pub report: LinkReport,
    pub system_temperature_k: f64,
    pub noise_power_dbm: f64,
    pub eirp_dbm: f64,
    pub distance_m: f64,
    pub shadowing_db: f64,
}

/// Full chain at the configured storm, once per humidity.
pub fn run_margin_report(run: &Run) -> Result<Vec<MarginReport>> {
    let draws = run.shadowing.draws(run.seed, run.humidity.len());
    run.humidity
        .iter()
        .zip(draws)
        .map(|(&h, shadow_db)| {
            let eps = run.humidity_model.permittivity(h)?;
            let storm = run.storm.with_humidity(h);
            let scenario = run.scenario.with_shadowing_draw(shadow_db);
            let report = model_for(run, run.geometry, scenario).evaluate(&storm, eps);
            let row = SweepRow {
                band: run.band_label.clone(),
                scenario: run.scenario.kind,
                humidity_pct: h,
                height_m: storm.height_m,
                visibility_km: storm.reference_visibility_km,
                particle_radius_um: radius_um_from_m(storm.particle_radius_m),
                frequency_ghz: run.geometry.frequency_ghz,
                attenuation_db_per_km: report.dust_attenuation_db_per_km,
                baseline_loss_db: report.baseline_loss_db,
                modified_loss_db: report.modified_loss_db,
                margin_db: report.margin_db,
                link_ok: report.link_ok,
            };
            Ok(MarginReport {
                row,
                report,
                system_temperature_k: system_noise_temperature(&run.radio),
                noise_power_dbm: noise_power_dbm(&run.radio),
                eirp_dbm: run.radio.eirp_dbm(),
                distance_m: run.geometry.distance_m,
                shadowing_db: scenario.shadowing_db,
            })
        })
        .collect()
}

pub fn format_margin_report(m: &MarginReport, threshold_db: f64) -> String {
    let r = &m.report;
    let mut s = String::new();
    let _ = writeln!(s, "band              {} at {} GHz", m.row.band, m.row.frequency_ghz);
    let _ = writeln!(
        s,
        "scenario          {}, d = {} m, shadowing {:.2} dB",
        m.row.scenario, m.distance_m, m.shadowing_db
    );
    let _ = writeln!(
        s,
        "storm             V0 = {} km, a_e = {} um, H = {} %, h = {} m",
        m.row.visibility_km, m.row.particle_radius_um, m.row.humidity_pct, m.row.height_m
    );
    let _ = writeln!(s, "EIRP              {:.2} dBm", m.eirp_dbm);
    let _ = writeln!(
        s,
        "system noise      {:.1} K, {:.2} dBm",
        m.system_temperature_k, m.noise_power_dbm
    );
    let _ = writeln!(s, "baseline loss     {:.2} dB", r.baseline_loss_db);
    let _ = writeln!(
        s,
        "dust              {:.6} dB/km, {:.6} dB excess",
        r.dust_attenuation_db_per_km, r.dust_excess_db
    );
    let _ = writeln!(s, "modified loss     {:.2} dB", r.modified_loss_db);
    let _ = writeln!(
        s,
        "margin            {:.2} dB (threshold {} dB): {}",
        r.margin_db,
        threshold_db,
        if r.link_ok { "LINK OK" } else { "LINK FAILS" }
    );
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRow {
    pub band: Band,
    pub scenario: ScenarioKind,
    pub humidity_pct: f64,
    pub critical_visibility_km: Threshold,
    /// Metres.
    pub critical_particle_radius_m: Threshold,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    band: Band,
    scenario: ScenarioKind,
    humidity_pct: f64,
    shadow_db: f64,
}

fn threshold_cells(run: &Run) -> Vec<Cell> {
    let mut cells = Vec::new();
    for &h in &run.humidity {
        for band in Band::ALL {
            for scenario in ScenarioKind::ALL {
                cells.push(Cell {
                    band,
                    scenario,
                    humidity_pct: h,
                    shadow_db: 0.0,
                });
            }
        }
    }
    let draws = run.shadowing.draws(run.seed, cells.len());
    for (c, d) in cells.iter_mut().zip(draws) {
        c.shadow_db = d;
    }
    cells
}

fn cell_model(run: &Run, c: &Cell) -> Result<LinkModel> {
    let scenario = Scenario {
        kind: c.scenario,
        shadowing_db: run.scenario.shadowing_db,
    }
    .with_shadowing_draw(c.shadow_db);
    Ok(LinkModel {
        dust_mode: run.dust_mode,
        mie: run.mie,
        ..LinkModel::preset(c.band, scenario, run.geometry.distance_m)?
    })
}

/// Critical visibility and particle radius for both preset bands, both
/// scenarios and every configured humidity (humidity-major, then band, then
/// scenario). The radius search holds the storm's visibility fixed; the
/// visibility search holds its particle radius fixed.
pub fn run_threshold_table(run: &Run) -> Result<Vec<ThresholdRow>> {
    let cells = threshold_cells(run);
    par::map_ordered(&cells, |c| {
        let eps = run.humidity_model.permittivity(c.humidity_pct)?;
        let storm = run.storm.with_humidity(c.humidity_pct);
        let model = cell_model(run, c)?;
        Ok(ThresholdRow {
            band: c.band,
            scenario: c.scenario,
            humidity_pct: c.humidity_pct,
            critical_visibility_km: model.threshold_visibility(&storm, eps)?,
            critical_particle_radius_m: model.threshold_particle_radius(&storm, eps)?,
        })
    })
    .into_iter()
    .collect()
}

fn threshold_field(t: Threshold, scale: f64) -> String {
    match t {
        Threshold::At(v) => format_number(v * scale),
        Threshold::NoFailure => NO_FAILURE.to_string(),
    }
}

pub fn write_threshold_csv<W: Write>(rows: &[ThresholdRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(THRESHOLD_HEADER)?;
    for r in rows {
        w.write_record([
            r.band.name().to_string(),
            r.scenario.name().to_string(),
            format_number(r.humidity_pct),
            threshold_field(r.critical_visibility_km, 1.0),
            threshold_field(r.critical_particle_radius_m, 1e6),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a `no-failure` sentinel or a number.
pub fn parse_threshold(field: &str) -> Result<Threshold> {
    if field == NO_FAILURE {
        return Ok(Threshold::NoFailure);
    }
    field
        .parse()
        .map(Threshold::At)
        .map_err(|_| invalid(format!("`{field}` is neither a number nor `{NO_FAILURE}`")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierRow {
    pub band: Band,
    pub scenario: ScenarioKind,
    pub humidity_pct: f64,
    pub visibility_km: f64,
    pub critical_particle_radius_m: Threshold,
}

/// Critical radius along a visibility grid for every threshold-table cell.
pub fn run_failure_frontier(run: &Run, visibilities_km: &[f64]) -> Result<Vec<FrontierRow>> {
    let cells = threshold_cells(run);
    let per_cell: Vec<Result<Vec<FrontierRow>>> = par::map_ordered(&cells, |c| {
        let eps = run.humidity_model.permittivity(c.humidity_pct)?;
        let storm = run.storm.with_humidity(c.humidity_pct);
        let frontier = cell_model(run, c)?.failure_frontier(&storm, eps, visibilities_km)?;
        Ok(frontier
            .into_iter()
            .map(|(v, t)| FrontierRow {
                band: c.band,
                scenario: c.scenario,
                humidity_pct: c.humidity_pct,
                visibility_km: v,
                critical_particle_radius_m: t,
            })
            .collect())
    });
    let mut rows = Vec::new();
    for r in per_cell {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn write_frontier_csv<W: Write>(rows: &[FrontierRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FRONTIER_HEADER)?;
    for r in rows {
        w.write_record([
            r.band.name().to_string(),
            r.scenario.name().to_string(),
            format_number(r.humidity_pct),
            format_number(r.visibility_km),
            threshold_field(r.critical_particle_radius_m, 1e6),
        ])?;
    }
    w.flush()?;
    Ok(())
}
