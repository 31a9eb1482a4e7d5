//! Regression suite over the bundled scenarios.

use std::path::Path;

use rydswap_core::swap::{critical_ratio, DEFAULT_TARGET};

use crate::error::CliError;
use crate::output::{write_tables, Table};
use crate::run::{run, RunContext, RunOutput};
use crate::scenario::{parse_scenario, Scenario};
use crate::row;

/// Scenario files shipped with the binary, as `(name, text)`.
pub const BUNDLED: &[(&str, &str)] = &[
    ("tableS1", include_str!("../scenarios/tableS1.toml")),
    ("expand-NaCs", include_str!("../scenarios/expand-NaCs.toml")),
    ("swap-pair", include_str!("../scenarios/swap-pair.toml")),
    ("figS1", include_str!("../scenarios/figS1.toml")),
    ("r095-NaCs", include_str!("../scenarios/r095-NaCs.toml")),
    ("r095-LiCs", include_str!("../scenarios/r095-LiCs.toml")),
    ("r095-CaF", include_str!("../scenarios/r095-CaF.toml")),
    ("hyperfine-NaCs", include_str!("../scenarios/hyperfine-NaCs.toml")),
    ("hyperfine-LiCs", include_str!("../scenarios/hyperfine-LiCs.toml")),
    ("fidelity-grid", include_str!("../scenarios/fidelity-grid.toml")),
    ("interactions-synthetic", include_str!("../scenarios/interactions-synthetic.toml")),
];

pub fn bundled(name: &str) -> Option<Result<Scenario, CliError>> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(n, text)| parse_scenario(text, &format!("<bundled {n}>"), n))
}

/// One regression comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    /// Relative tolerance when true, absolute otherwise.
    pub relative: bool,
}

impl Check {
    pub fn abs(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, expected, tolerance, relative: false }
    }

    pub fn rel(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, expected, tolerance, relative: true }
    }

    /// Passes when `value <= expected`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, expected: bound, tolerance: f64::INFINITY, relative: false }
    }

    pub fn pass(&self) -> bool {
        if self.tolerance.is_infinite() {
            return self.value <= self.expected;
        }
        let dev = (self.value - self.expected).abs();
        let scale = if self.relative { self.expected.abs() } else { 1.0 };
        dev <= self.tolerance * scale
    }

    pub fn line(&self) -> String {
        let status = if self.pass() { "PASS" } else { "FAIL" };
        if self.tolerance.is_infinite() {
            format!("{status} {}: {:.6e} <= {:.6e}", self.name, self.value, self.expected)
        } else {
            let kind = if self.relative { " rel" } else { "" };
            format!("{status} {}: {:.6e} vs {:.6e} (tol {:.1e}{kind})", self.name, self.value, self.expected, self.tolerance)
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub outputs: Vec<(Scenario, RunOutput)>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["check", "value", "expected", "tolerance", "relative", "pass"]);
        for c in &self.checks {
            let tol = if c.tolerance.is_infinite() { None } else { Some(c.tolerance) };
            t.push(row![c.name.as_str(), c.value, c.expected, tol, c.relative, c.pass()]);
        }
        t
    }
}

const TABLE_S1: [(&str, f64); 15] = [
    ("Na", 0.018),
    ("Na-Cs", 0.0073),
    ("Na-NaCs", 0.0068),
    ("Cs", 0.0030),
    ("Cs-NaCs", 0.0028),
    ("NaCs", 0.0026),
    ("Li", 0.067),
    ("Li-Cs", 0.014),
    ("Li-LiCs", 0.014),
    ("Cs", 0.0030),
    ("Cs-LiCs", 0.0030),
    ("LiCs", 0.0029),
    ("Rb", 0.0047),
    ("Rb-CaF", 0.0057),
    ("CaF", 0.0069),
];

const R095: [(&str, f64); 5] = [("Na70S", 1.36), ("Cs73S", 0.88), ("Li49S", 0.57), ("Cs48S", 0.46), ("Rb47S", 0.63)];

fn col(t: &Table, row: &[crate::output::Cell], name: &str) -> Option<f64> {
    t.column(name).and_then(|c| row[c].as_f64())
}

fn main_table<'a>(outputs: &'a [(Scenario, RunOutput)], name: &str) -> Option<&'a Table> {
    outputs.iter().find(|(s, _)| s.name == name).map(|(_, o)| &o[0].1)
}

fn table_named<'a>(outputs: &'a [(Scenario, RunOutput)], name: &str, suffix: &str) -> Option<&'a Table> {
    outputs
        .iter()
        .find(|(s, _)| s.name == name)
        .and_then(|(_, o)| o.iter().find(|(p, _)| p.ends_with(suffix)).map(|(_, t)| t))
}

/// Efficiency curves of a swap-chain table keyed by case label, in row order.
pub fn efficiency_curves(t: &Table) -> Vec<(String, Vec<(f64, f64)>)> {
    let (l, e, f) = (t.column("label").unwrap(), t.column("eta").unwrap(), t.column("efficiency").unwrap());
    let mut curves: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for r in &t.rows {
        let label = r[l].as_str().unwrap_or_default().to_string();
        let point = (r[e].as_f64().unwrap(), r[f].as_f64().unwrap());
        match curves.iter_mut().find(|(k, _)| *k == label) {
            Some((_, c)) => c.push(point),
            None => curves.push((label, vec![point])),
        }
    }
    curves
}

/// Checks computed from the bundled outputs.
pub fn checks(outputs: &[(Scenario, RunOutput)]) -> Vec<Check> {
    let mut out = vec![Check::abs("critical_ratio", critical_ratio(DEFAULT_TARGET).unwrap_or(f64::NAN), 15.24, 0.01)];

    if let Some(t) = main_table(outputs, "tableS1") {
        let values: Vec<f64> =
            t.rows.iter().filter(|r| r[0].as_str() == Some("anharmonicity")).filter_map(|r| col(t, r, "value")).collect();
        for (k, (label, expected)) in TABLE_S1.iter().enumerate() {
            let v = values.get(k).copied().unwrap_or(f64::NAN);
            out.push(Check::rel(format!("tableS1 {label} #{k}"), v, *expected, 0.05));
        }
    }

    if let Some(t) = main_table(outputs, "expand-NaCs") {
        let get = |section: &str, label: &str| {
            t.rows
                .iter()
                .find(|r| r[0].as_str() == Some(section) && r[1].as_str() == Some(label))
                .and_then(|r| col(t, r, "value"))
                .unwrap_or(f64::NAN)
        };
        for label in ["x", "y", "z", "xz"] {
            out.push(Check::rel(
                format!("expand-NaCs finite-difference {label}"),
                get("finite_difference", label),
                get("coefficient", label),
                1e-6,
            ));
        }
    }

    if let Some(t) = main_table(outputs, "swap-pair") {
        for (label, expected) in [("vdW-50G", 0.999), ("vdW-10G", 0.982)] {
            let v = t.lookup("label", label, "efficiency").unwrap_or(f64::NAN);
            out.push(Check::abs(format!("swap-pair {label}"), v, expected, 0.002));
        }
    }

    if let Some(t) = main_table(outputs, "figS1") {
        for (label, curve) in efficiency_curves(t) {
            let drop = curve.windows(2).map(|w| w[0].1 - w[1].1).fold(0.0, f64::max);
            out.push(Check::at_most(format!("figS1 {label} monotone"), drop, 1e-9));
            let expected = if label.contains("10G") { 0.982 } else { 0.999 };
            let last = curve.last().map_or(f64::NAN, |p| p.1);
            out.push(Check::abs(format!("figS1 {label} limit"), last, expected, 0.002));
        }
    }

    for name in ["r095-NaCs", "r095-LiCs", "r095-CaF"] {
        let Some(t) = main_table(outputs, name) else { continue };
        for (label, expected) in R095 {
            let Some(r095) = t.lookup("label", label, "r095_um") else { continue };
            out.push(Check::abs(format!("{name} {label} r095"), r095, expected, 0.01));
            if let Some(d) = t.lookup("label", label, "r_eff_rel_dev") {
                out.push(Check::at_most(format!("{name} {label} distance consistency"), d.abs(), 0.03));
            }
            if let Some(d) = t.lookup("label", label, "gamma_rel_dev") {
                out.push(Check::at_most(format!("{name} {label} decay consistency"), d.abs(), 0.03));
            }
        }
    }

    for name in ["hyperfine-NaCs", "hyperfine-LiCs"] {
        if let Some(t) = table_named(outputs, name, "_purity.csv") {
            let worst = t.rows.iter().filter_map(|r| col(t, r, "purity")).fold(1.0, f64::min);
            out.push(Check::at_most(format!("{name} stretched impurity"), 1.0 - worst, 1e-10));
        }
        if let Some(t) = table_named(outputs, name, "_dressing.csv") {
            for r in &t.rows {
                let (lo, hi) = (col(t, r, "n_low").unwrap_or(f64::NAN), col(t, r, "n_high").unwrap_or(f64::NAN));
                let dev = col(t, r, "deviation").unwrap_or(f64::NAN);
                out.push(Check::at_most(format!("{name} dressing {lo}->{hi} deviation"), dev, 0.0025));
            }
        }
    }

    if let Some(t) = main_table(outputs, "fidelity-grid") {
        let (a, n, e, f) = (t.column("a2"), t.column("n"), t.column("epsilon"), t.column("fidelity"));
        if let (Some(a), Some(n), Some(e), Some(f)) = (a, n, e, f) {
            let hit = t.rows.iter().find(|r| {
                r[a].as_f64() == Some(0.5) && r[n].as_f64() == Some(20.0) && (r[e].as_f64().unwrap_or(0.0) - 0.05).abs() < 1e-12
            });
            let v = hit.and_then(|r| r[f].as_f64()).unwrap_or(f64::NAN);
            out.push(Check::abs("fidelity a2=0.5 n=20 eps=0.05", v, 0.952419, 5e-7));
        }
    }
    out
}

/// Runs every bundled scenario into `dir` and writes `checks.csv` there.
pub fn verify(dir: &Path, ctx: &RunContext) -> Result<VerifyReport, CliError> {
    use rayon::prelude::*;
    let outputs = BUNDLED
        .par_iter()
        .map(|(name, text)| {
            let s = parse_scenario(text, &format!("<bundled {name}>"), name)?;
            let o = run(&s, ctx)?;
            Ok((s, o))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    for (_, tables) in &outputs {
        write_tables(dir, tables)?;
    }
    let report = VerifyReport { checks: checks(&outputs), outputs };
    write_tables(dir, &[("checks.csv".to_string(), report.table())])?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_parse() {
        for (name, _) in BUNDLED {
            let s = bundled(name).unwrap().unwrap();
            assert_eq!(s.name, *name);
        }
        assert!(bundled("nope").is_none());
    }

    #[test]
    fn check_semantics() {
        assert!(Check::abs("a", 1.005, 1.0, 0.01).pass());
        assert!(!Check::rel("b", 1.2, 1.0, 0.1).pass());
        assert!(Check::at_most("c", 0.1, 0.2).pass());
        assert!(!Check::at_most("d", f64::NAN, 0.2).pass());
        assert!(Check::abs("e", 1.0, 1.0, 0.0).line().starts_with("PASS"));
    }
}
