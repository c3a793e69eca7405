//! Reports and their two renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use bellcheck_core::inequalities::InequalityReport;
use bellcheck_core::locality::{LocalityVerdict, Witness};
use bellcheck_core::model::{Axis, SettingIndex};
use bellcheck_core::montecarlo::{EmpiricalChsh, OutcomeCounts};
use bellcheck_core::polytope::{DeterministicStrategy, PolytopeReport};
use bellcheck_core::Scalar;
use serde::Serialize;

use crate::model_file::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Structured,
}

/// A number with its exact value when there is one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Value {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

impl Value {
    pub fn of<S: Scalar>(v: &S) -> Self {
        Value {
            value: v.to_f64(),
            exact: S::EXACT.then(|| v.to_string()),
        }
    }

    pub fn float(value: f64) -> Self {
        Value { value, exact: None }
    }
}

fn show(v: &Value) -> String {
    match &v.exact {
        Some(e) if e.contains('/') => format!("{e} ({:.10})", v.value),
        Some(e) => e.clone(),
        None => format!("{:.10}", v.value),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessOut {
    pub setting: [usize; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub other_setting: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub station: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    pub discrepancy: f64,
    pub detail: String,
}

fn pair(s: SettingIndex) -> [usize; 2] {
    [s.station1, s.station2]
}

impl WitnessOut {
    pub fn new(w: &Witness, label: &dyn Fn(usize) -> String) -> Self {
        WitnessOut {
            setting: pair(w.setting),
            other_setting: w.other_setting.map(pair),
            station: w.station.map(|s| s.to_string()),
            lambda: w.lambda.map(label),
            discrepancy: w.discrepancy,
            detail: w.detail.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictOut {
    pub condition: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessOut>,
}

impl VerdictOut {
    pub fn new(v: &LocalityVerdict, label: &dyn Fn(usize) -> String) -> Self {
        VerdictOut {
            condition: v.condition.name().to_string(),
            holds: v.holds,
            witness: v.witness.as_ref().map(|w| WitnessOut::new(w, label)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityOut {
    pub kind: String,
    pub axes: Vec<[f64; 3]>,
    pub inputs: Vec<Value>,
    pub lhs: Value,
    pub bound: Value,
    pub violated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_over_placements: Option<Value>,
}

impl InequalityOut {
    pub fn new<S: Scalar>(r: &InequalityReport<S>, axes: &[Axis]) -> Self {
        InequalityOut {
            kind: r.kind.name().to_string(),
            axes: axes.iter().map(Axis::direction).collect(),
            inputs: r.inputs.iter().map(Value::of).collect(),
            lhs: Value::of(&r.lhs),
            bound: Value::of(&r.bound),
            violated: r.violated,
            max_over_placements: r.max_over_placements.as_ref().map(Value::of),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyOut {
    pub assign1: Vec<String>,
    pub assign2: Vec<String>,
}

impl From<&DeterministicStrategy> for StrategyOut {
    fn from(s: &DeterministicStrategy) -> Self {
        StrategyOut {
            assign1: s.assign1.iter().map(|x| x.to_string()).collect(),
            assign2: s.assign2.iter().map(|x| x.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolytopeOut {
    pub inequality: String,
    pub n1: usize,
    pub n2: usize,
    pub n_strategies: u64,
    pub n_admissible: u64,
    pub max_lhs: Value,
    pub bound: Value,
    pub bound_match: bool,
    pub argmax: StrategyOut,
}

impl PolytopeOut {
    pub fn new(r: &PolytopeReport, n1: usize, n2: usize) -> Self {
        PolytopeOut {
            inequality: r.kind.name().to_string(),
            n1,
            n2,
            n_strategies: r.n_strategies,
            n_admissible: r.n_admissible,
            max_lhs: Value::of(&r.max_lhs),
            bound: Value::of(&r.bound),
            bound_match: r.bound_match,
            argmax: (&r.argmax).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionOut {
    pub axis: [f64; 3],
    /// `None` when the checker refused.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probability: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub up_probability: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conditional: Vec<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub verified: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refusal: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SettingCounts {
    pub axes: [[f64; 3]; 2],
    pub trials: u64,
    /// ↑↑, ↑↓, ↓↑, ↓↓.
    pub counts: [u64; 4],
    pub e_hat: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationOut {
    pub seed: u64,
    pub settings: Vec<SettingCounts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chsh: Option<EmpiricalOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalOut {
    pub lhs: f64,
    pub std_err: f64,
    pub violated: bool,
}

impl From<&EmpiricalChsh> for EmpiricalOut {
    fn from(e: &EmpiricalChsh) -> Self {
        EmpiricalOut {
            lhs: e.report.lhs,
            std_err: e.std_err,
            violated: e.report.violated,
        }
    }
}

impl SettingCounts {
    pub fn new(axes: [Axis; 2], c: &OutcomeCounts) -> anyhow::Result<Self> {
        let e = c.correlation()?;
        Ok(SettingCounts {
            axes: axes.map(|a| a.direction()),
            trials: c.total(),
            counts: c.counts,
            e_hat: e.e_hat,
            std_err: e.std_err,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub source: String,
    pub mode: Mode,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<VerdictOut>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub inequalities: Vec<InequalityOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polytope: Option<PolytopeOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extraction: Option<ExtractionOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationOut>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall-clock milliseconds per phase; only filled on request so that
    /// reports are otherwise reproducible byte for byte.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn new(command: &str, source: &str, mode: Mode) -> Self {
        Report {
            command: command.to_string(),
            source: source.to_string(),
            mode,
            passed: true,
            verdicts: Vec::new(),
            inequalities: Vec::new(),
            polytope: None,
            extraction: None,
            simulation: None,
            notes: Vec::new(),
            timings_ms: None,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Human => self.human(),
        }
    }

    fn human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} on {} ({} arithmetic)", self.command, self.source, self.mode);
        for v in &self.verdicts {
            let _ = writeln!(out, "  {:<32} {}", v.condition, if v.holds { "holds" } else { "FAILS" });
            if let Some(w) = &v.witness {
                let _ = write!(out, "    witness: setting [{}, {}]", w.setting[0], w.setting[1]);
                if let Some(o) = w.other_setting {
                    let _ = write!(out, " vs [{}, {}]", o[0], o[1]);
                }
                if let Some(st) = &w.station {
                    let _ = write!(out, ", station {st}");
                }
                if let Some(l) = &w.lambda {
                    let _ = write!(out, ", {l}");
                }
                let _ = writeln!(out);
                let _ = writeln!(out, "    {} (discrepancy {:e})", w.detail, w.discrepancy);
            }
        }
        for q in &self.inequalities {
            let _ = writeln!(out, "  {}", q.kind);
            for (k, a) in q.axes.iter().enumerate() {
                let _ = writeln!(out, "    axis {k}: ({:.6}, {:.6}, {:.6})", a[0], a[1], a[2]);
            }
            let inputs: Vec<String> = q.inputs.iter().map(show).collect();
            let _ = writeln!(out, "    inputs: {}", inputs.join(", "));
            let _ = writeln!(out, "    lhs {}  bound {}  {}", show(&q.lhs), show(&q.bound), if q.violated { "VIOLATED" } else { "satisfied" });
            if let Some(m) = &q.max_over_placements {
                let _ = writeln!(out, "    largest over minus-sign placements: {}", show(m));
            }
        }
        if let Some(p) = &self.polytope {
            let _ = writeln!(out, "  {} over {} + {} axes", p.inequality, p.n1, p.n2);
            let _ = writeln!(out, "    strategies {} (admissible {})", p.n_strategies, p.n_admissible);
            let _ = writeln!(out, "    max lhs {}  bound {}  {}", show(&p.max_lhs), show(&p.bound), if p.bound_match { "bound attained" } else { "bound NOT attained" });
            let _ = writeln!(out, "    argmax: station 1 ({}) station 2 ({})", p.argmax.assign1.join(","), p.argmax.assign2.join(","));
        }
        if let Some(e) = &self.extraction {
            let a = e.axis;
            let _ = writeln!(out, "  axis ({:.6}, {:.6}, {:.6})", a[0], a[1], a[2]);
            match (&e.members, &e.refusal) {
                (Some(m), _) => {
                    let _ = writeln!(out, "    A1S = {{{}}}", m.join(", "));
                    if let (Some(p), Some(u)) = (&e.probability, &e.up_probability) {
                        let _ = writeln!(out, "    P(A1S) = {}  P(up at 1) = {}", show(p), show(u));
                    }
                    for v in &e.verified {
                        let _ = writeln!(out, "    verified: {v}");
                    }
                }
                (None, Some(r)) => {
                    let _ = writeln!(out, "    refused: {r}");
                }
                (None, None) => {}
            }
        }
        if let Some(s) = &self.simulation {
            let _ = writeln!(out, "  simulation (seed {})", s.seed);
            for (k, c) in s.settings.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "    setting {k}: n {}  counts uu {} ud {} du {} dd {}  E {:.6} +- {:.6}",
                    c.trials, c.counts[0], c.counts[1], c.counts[2], c.counts[3], c.e_hat, c.std_err
                );
            }
            if let Some(c) = &s.chsh {
                let _ = writeln!(out, "    empirical chsh lhs {:.6} +- {:.6}  {}", c.lhs, c.std_err, if c.violated { "VIOLATED" } else { "satisfied" });
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        if let Some(t) = &self.timings_ms {
            for (k, v) in t {
                let _ = writeln!(out, "  time {k}: {v:.1} ms");
            }
        }
        let _ = writeln!(out, "result: {}", if self.passed { "pass" } else { "FAIL" });
        out
    }
}
