//! Report files: a versioned, schema-stable record of one run.
//!
//! JSON is the primary format and round-trips; CSV is a write-only
//! flattening with dotted headers for spreadsheet work. Both embed the
//! config the run used, so a report is a reproducible artifact on its
//! own. Plots are deterministic hand-rolled SVG.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certifier::search::SearchResult;
use crate::certifier::tightness::TightnessResult;
use crate::certifier::{InequalityReport, Verdict, VerdictCounts};
use crate::config::{Command, ExperimentConfig, ReportFormat};
use crate::norms::EstimateMode;

/// Schema revision of the report layout, independent of the tool version.
pub const REPORT_SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("report parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("nothing to plot")]
    EmptyPlot,
}

/// Headline numbers of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub counts: VerdictCounts,
    /// Largest per-instance constant over the run, when the records
    /// carry the estimates a fit needs.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fitted_constant: Option<f64>,
    /// Best objective of a search run.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub best_ratio: Option<f64>,
}

/// One run's complete output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    /// Schema revision; bump on layout changes.
    pub version: String,
    pub tool_version: String,
    pub command: Command,
    /// The exact config the run used, after flag overrides.
    pub config: ExperimentConfig,
    /// Zero under a fixed clock.
    pub total_runtime_ms: u64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub records: Vec<InequalityReport>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub tightness: Vec<TightnessResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub search: Option<SearchResult>,
    pub summary: Summary,
}

impl ReportFile {
    pub fn new(
        command: Command,
        config: ExperimentConfig,
        total_runtime_ms: u64,
        records: Vec<InequalityReport>,
    ) -> Self {
        let counts = VerdictCounts::tally(&records);
        ReportFile {
            version: REPORT_SCHEMA_VERSION.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command,
            config,
            total_runtime_ms,
            records,
            tightness: Vec::new(),
            search: None,
            summary: Summary { counts, fitted_constant: None, best_ratio: None },
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json_str(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: &Path, format: ReportFormat) -> Result<(), ReportError> {
        let text = match format {
            ReportFormat::Json => self.to_json_string(),
            ReportFormat::Csv => self.to_csv_string(),
        };
        std::fs::write(path, text)
            .map_err(|e| ReportError::Io { path: path.display().to_string(), source: e })
    }

    /// Flatten to CSV: config echo as `#` comment lines, dotted headers,
    /// one row per record. Inequality records, tightness rows, and a
    /// search trace are mutually exclusive per run, so whichever payload
    /// is present decides the column set.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# report version {} (tool {}), command {}, total_runtime_ms {}\n",
            self.version, self.tool_version, self.command, self.total_runtime_ms
        ));
        for line in self.config.to_toml_string().lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        if !self.tightness.is_empty() {
            out.push_str(
                "d,epsilon,full_norm,stirling_lower,restricted_integral,epsilon_bound,\
                 mass_ratio,mu_a,restricted_norm,bound_factor,bound_value\n",
            );
            for t in &self.tightness {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    t.d,
                    t.epsilon,
                    t.full_norm,
                    t.stirling_lower,
                    t.restricted_integral,
                    t.epsilon_bound,
                    t.mass_ratio,
                    t.mu_a,
                    t.restricted_norm,
                    t.bound_factor,
                    t.bound_value
                ));
            }
            return out;
        }
        if let Some(search) = &self.search {
            out.push_str("step,best_ratio\n");
            for (i, r) in search.trace.iter().enumerate() {
                out.push_str(&format!("{i},{r}\n"));
            }
            return out;
        }
        out.push_str(
            "instance.suite,instance.n,instance.d,instance.p,instance.body,instance.set,\
             instance.poly_index,instance.threshold,instance.seed,\
             lhs.value,lhs.radius,lhs.mode,lhs.samples_used,lhs.flagged,\
             rhs.value,rhs.radius,rhs.mode,rhs.samples_used,rhs.flagged,\
             full_norm.value,full_norm.radius,mu_a.value,mu_a.radius,\
             margin,verdict,c_hat,branch_low,branch_high,ak_factor,wall_ms\n",
        );
        for r in &self.records {
            let i = &r.instance;
            let cells: Vec<String> = vec![
                i.suite.clone(),
                i.n.to_string(),
                i.d.to_string(),
                opt_num(i.p),
                i.body.clone(),
                i.set.clone(),
                i.poly_index.to_string(),
                opt_num(i.threshold),
                i.seed.to_string(),
                r.lhs.value.to_string(),
                r.lhs.radius.to_string(),
                mode_label(r.lhs.mode).into(),
                r.lhs.samples_used.to_string(),
                r.lhs.flagged.to_string(),
                r.rhs.value.to_string(),
                r.rhs.radius.to_string(),
                mode_label(r.rhs.mode).into(),
                r.rhs.samples_used.to_string(),
                r.rhs.flagged.to_string(),
                opt_num(r.full_norm.as_ref().map(|e| e.value)),
                opt_num(r.full_norm.as_ref().map(|e| e.radius)),
                opt_num(r.mu_a.as_ref().map(|e| e.value)),
                opt_num(r.mu_a.as_ref().map(|e| e.radius)),
                r.margin.to_string(),
                verdict_label(r.verdict).into(),
                opt_num(r.c_hat),
                opt_num(r.branch_factors.map(|(lo, _)| lo)),
                opt_num(r.branch_factors.map(|(_, hi)| hi)),
                opt_num(r.ak_factor),
                r.wall_ms.to_string(),
            ];
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn mode_label(mode: EstimateMode) -> &'static str {
    match mode {
        EstimateMode::Exact => "exact",
        EstimateMode::MonteCarlo => "monte_carlo",
    }
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::HoldsWithinNoise => "holds_within_noise",
        Verdict::Violated => "violated",
        Verdict::Inconclusive => "inconclusive",
    }
}

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 420.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 24.0;
const MARGIN_B: f64 = 44.0;

struct Axes {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Axes {
    fn from_points(points: &[(f64, f64)]) -> Axes {
        let mut a = Axes {
            x_lo: f64::INFINITY,
            x_hi: f64::NEG_INFINITY,
            y_lo: f64::INFINITY,
            y_hi: f64::NEG_INFINITY,
        };
        for &(x, y) in points {
            a.x_lo = a.x_lo.min(x);
            a.x_hi = a.x_hi.max(x);
            a.y_lo = a.y_lo.min(y);
            a.y_hi = a.y_hi.max(y);
        }
        for (lo, hi) in [(&mut a.x_lo, &mut a.x_hi), (&mut a.y_lo, &mut a.y_hi)] {
            if *lo == *hi {
                *lo -= 0.5;
                *hi += 0.5;
            }
            let pad = 0.05 * (*hi - *lo);
            *lo -= pad;
            *hi += pad;
        }
        a
    }

    fn sx(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x_lo) / (self.x_hi - self.x_lo) * (PLOT_W - MARGIN_L - MARGIN_R)
    }

    fn sy(&self, y: f64) -> f64 {
        PLOT_H - MARGIN_B - (y - self.y_lo) / (self.y_hi - self.y_lo) * (PLOT_H - MARGIN_T - MARGIN_B)
    }
}

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" \
         viewBox=\"0 0 {PLOT_W} {PLOT_H}\">\n<rect width=\"{PLOT_W}\" height=\"{PLOT_H}\" \
         fill=\"white\"/>\n<text x=\"{:.1}\" y=\"16\" text-anchor=\"middle\" \
         font-family=\"monospace\" font-size=\"13\">{title}</text>\n",
        PLOT_W / 2.0
    )
}

fn svg_axes(a: &Axes, x_label: &str, y_label: &str) -> String {
    let x0 = a.sx(a.x_lo);
    let x1 = a.sx(a.x_hi);
    let y0 = a.sy(a.y_lo);
    let y1 = a.sy(a.y_hi);
    format!(
        "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x1:.1}\" y2=\"{y0:.1}\" stroke=\"black\"/>\n\
         <line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x0:.1}\" y2=\"{y1:.1}\" stroke=\"black\"/>\n\
         <text x=\"{x0:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\">{:.4}</text>\n\
         <text x=\"{x1:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"monospace\" \
         font-size=\"11\">{:.4}</text>\n\
         <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"monospace\" \
         font-size=\"12\">{x_label}</text>\n\
         <text x=\"12\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\">{:.4}</text>\n\
         <text x=\"12\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\">{:.4}</text>\n\
         <text x=\"14\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" \
         transform=\"rotate(-90 14 {:.1})\" text-anchor=\"middle\">{y_label}</text>\n",
        y0 + 16.0,
        a.x_lo,
        y0 + 16.0,
        a.x_hi,
        (x0 + x1) / 2.0,
        PLOT_H - 8.0,
        y0,
        a.y_lo,
        y1 + 10.0,
        a.y_hi,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
    )
}

fn verdict_color(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "#2a7e2a",
        Verdict::HoldsWithinNoise => "#c8881e",
        Verdict::Violated => "#c22828",
        Verdict::Inconclusive => "#8a8a8a",
    }
}

/// Margin-versus-μ(A) scatter; suites without a set measure fall back to
/// the threshold, so level-set runs plot margin against t.
pub fn plot_margins(records: &[InequalityReport]) -> Result<String, ReportError> {
    let mut points = Vec::with_capacity(records.len());
    for r in records {
        let x = r
            .mu_a
            .as_ref()
            .map(|e| e.value)
            .or(r.instance.threshold)
            .unwrap_or(r.instance.poly_index as f64);
        points.push((x, r.margin, r.verdict));
    }
    if points.is_empty() {
        return Err(ReportError::EmptyPlot);
    }
    let flat: Vec<(f64, f64)> = points.iter().map(|&(x, y, _)| (x, y)).collect();
    let axes = Axes::from_points(&flat);
    let mut svg = svg_open("margin vs set size");
    svg.push_str(&svg_axes(&axes, "mu(A) (or threshold)", "margin"));
    if axes.y_lo < 0.0 && axes.y_hi > 0.0 {
        let zy = axes.sy(0.0);
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{zy:.1}\" x2=\"{:.1}\" y2=\"{zy:.1}\" \
             stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n",
            axes.sx(axes.x_lo),
            axes.sx(axes.x_hi),
        ));
    }
    for (x, y, v) in points {
        svg.push_str(&format!(
            "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"2.5\" fill=\"{}\" fill-opacity=\"0.7\"/>\n",
            axes.sx(x),
            axes.sy(y),
            verdict_color(v),
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Tightness curves on a log10 y-axis: the exact restricted integral,
/// its ε^{d+1}/(d+1) cap, and the certified lower-bound value, per
/// degree, against ε.
pub fn plot_tightness(results: &[TightnessResult]) -> Result<String, ReportError> {
    if results.is_empty() {
        return Err(ReportError::EmptyPlot);
    }
    let mut degrees: Vec<u32> = results.iter().map(|t| t.d).collect();
    degrees.sort_unstable();
    degrees.dedup();

    let log10 = |v: f64| v.max(1e-300).log10();
    let mut flat = Vec::new();
    for t in results {
        flat.push((t.epsilon, log10(t.restricted_integral)));
        flat.push((t.epsilon, log10(t.epsilon_bound)));
        flat.push((t.epsilon, log10(t.bound_value)));
    }
    let axes = Axes::from_points(&flat);
    let mut svg = svg_open("restricted mass of t^d near 0");
    svg.push_str(&svg_axes(&axes, "epsilon", "log10 value"));
    let series: [(&str, fn(&TightnessResult) -> f64); 3] = [
        ("#2a5e9e", |t| t.restricted_integral),
        ("#c8881e", |t| t.epsilon_bound),
        ("#2a7e2a", |t| t.bound_value),
    ];
    for d in degrees {
        let mut row: Vec<&TightnessResult> = results.iter().filter(|t| t.d == d).collect();
        row.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
        for (color, pick) in series {
            let pts: Vec<String> = row
                .iter()
                .map(|t| format!("{:.1},{:.1}", axes.sx(t.epsilon), axes.sy(log10(pick(t)))))
                .collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                pts.join(" ")
            ));
        }
    }
    svg.push_str(
        "<text x=\"70\" y=\"36\" font-family=\"monospace\" font-size=\"11\" \
         fill=\"#2a5e9e\">exact integral</text>\n\
         <text x=\"70\" y=\"50\" font-family=\"monospace\" font-size=\"11\" \
         fill=\"#c8881e\">epsilon cap</text>\n\
         <text x=\"70\" y=\"64\" font-family=\"monospace\" font-size=\"11\" \
         fill=\"#2a7e2a\">certified lower bound</text>\n</svg>\n",
    );
    Ok(svg)
}

/// Best-ratio trace of a search run against the step index.
pub fn plot_search(result: &SearchResult) -> Result<String, ReportError> {
    if result.trace.is_empty() {
        return Err(ReportError::EmptyPlot);
    }
    let pts: Vec<(f64, f64)> =
        result.trace.iter().enumerate().map(|(i, &r)| (i as f64, r)).collect();
    let axes = Axes::from_points(&pts);
    let mut svg = svg_open("search progress");
    svg.push_str(&svg_axes(&axes, "step", "best ratio"));
    let path: Vec<String> =
        pts.iter().map(|&(x, y)| format!("{:.1},{:.1}", axes.sx(x), axes.sy(y))).collect();
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#2a5e9e\" stroke-width=\"1.5\"/>\n</svg>\n",
        path.join(" ")
    ));
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certifier::tightness::tightness_exponential;
    use crate::certifier::{InstanceDescriptor, ReportedEstimate};
    use crate::norms::EstimateMode;

    fn sample_record(verdict: Verdict) -> InequalityReport {
        InequalityReport {
            instance: InstanceDescriptor {
                suite: "restricted_norm".into(),
                n: 1,
                d: 1,
                p: Some(1.0),
                body: "box".into(),
                set: "halfspace_q50".into(),
                poly_index: 0,
                threshold: None,
                seed: 7,
            },
            lhs: ReportedEstimate {
                value: 0.75,
                radius: 0.01,
                mode: EstimateMode::MonteCarlo,
                samples_used: 1000,
                flagged: false,
            },
            rhs: ReportedEstimate {
                value: 0.03,
                radius: 0.001,
                mode: EstimateMode::MonteCarlo,
                samples_used: 1000,
                flagged: false,
            },
            full_norm: Some(ReportedEstimate {
                value: 0.5,
                radius: 0.01,
                mode: EstimateMode::MonteCarlo,
                samples_used: 1000,
                flagged: false,
            }),
            mu_a: Some(ReportedEstimate {
                value: 0.5,
                radius: 0.005,
                mode: EstimateMode::MonteCarlo,
                samples_used: 1000,
                flagged: false,
            }),
            margin: 0.72,
            verdict,
            c_hat: Some(1.0 / 6.0),
            branch_factors: Some((0.0625, 0.125)),
            ak_factor: None,
            wall_ms: 0,
        }
    }

    fn sample_file(records: Vec<InequalityReport>) -> ReportFile {
        let config = ExperimentConfig::from_toml_str("seed = 7\n").unwrap();
        ReportFile::new(Command::VerifyTheorem1, config, 0, records)
    }

    #[test]
    fn json_round_trip_preserves_records() {
        let file = sample_file(vec![sample_record(Verdict::Holds)]);
        let back = ReportFile::from_json_str(&file.to_json_string()).unwrap();
        assert_eq!(file, back);
        assert_eq!(back.summary.counts.holds, 1);
        assert_eq!(back.summary.counts.total, 1);
    }

    #[test]
    fn empty_report_is_a_valid_file() {
        let file = sample_file(Vec::new());
        let back = ReportFile::from_json_str(&file.to_json_string()).unwrap();
        assert_eq!(back.summary.counts.total, 0);
        let csv = file.to_csv_string();
        let data_lines: Vec<&str> =
            csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data_lines.len(), 1, "header only");
        assert!(data_lines[0].starts_with("instance.suite,"));
        assert!(csv.lines().any(|l| l.starts_with("# seed = 7")));
    }

    #[test]
    fn csv_flattens_with_dotted_headers() {
        let file = sample_file(vec![
            sample_record(Verdict::Holds),
            sample_record(Verdict::HoldsWithinNoise),
        ]);
        let csv = file.to_csv_string();
        let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 3);
        let header: Vec<&str> = data[0].split(',').collect();
        let row: Vec<&str> = data[1].split(',').collect();
        assert_eq!(header.len(), row.len());
        assert_eq!(header[0], "instance.suite");
        assert!(header.contains(&"lhs.value"));
        assert!(header.contains(&"mu_a.radius"));
        let verdict_col = header.iter().position(|&h| h == "verdict").unwrap();
        assert_eq!(row[verdict_col], "holds");
        let ak_col = header.iter().position(|&h| h == "ak_factor").unwrap();
        assert_eq!(row[ak_col], "", "absent optional flattens to an empty cell");
    }

    #[test]
    fn margins_plot_is_deterministic_and_renders_each_point() {
        let file = sample_file(vec![sample_record(Verdict::Holds)]);
        let one = plot_margins(&file.records).unwrap();
        let two = plot_margins(&file.records).unwrap();
        assert_eq!(one, two);
        assert_eq!(one.matches("<circle").count(), 1);
        assert!(plot_margins(&[]).is_err());
    }

    #[test]
    fn tightness_plot_has_three_curves_per_degree() {
        let grid: Vec<TightnessResult> = [0.1, 0.5, 1.0]
            .iter()
            .map(|&eps| tightness_exponential(3, eps, 4.0).unwrap())
            .collect();
        let svg = plot_tightness(&grid).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert_eq!(svg, plot_tightness(&grid).unwrap());
    }
}
