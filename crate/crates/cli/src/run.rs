//! Scenario execution: each kind produces one or more CSV tables.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use rydswap_core::dynamics::{simulate_swap, ChainModel, ChainSpec, InitialState};
use rydswap_core::expansion::{
    anharmonicity, expand_closed_form, expand_finite_difference, known_mass, phonon_couplings, Axis, Coefficients,
    RadialAngularPotential, SpeciesSpec,
};
use rydswap_core::fidelity::{fidelity, QubitPhononInput};
use rydswap_core::hyperfine::{dressing_deviation_with, spectrum, stretched_state_purity_at, SpectrumOptions};
use rydswap_core::interactions::{angular_matrix, c6_channel, mixing_fraction_with, MixingOptions};
use rydswap_core::swap::{
    coupling_decay_ratio, critical_ratio, surviving_fraction, surviving_fraction_monte_carlo, swap_range, RangeSpec,
};

use crate::error::CliError;
use crate::output::Table;
use crate::row;
use crate::scenario::*;

/// Settings shared by every run.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunContext {
    /// Seed for the Monte-Carlo oracle.
    pub seed: u64,
}

/// Tables keyed by their path relative to the output directory.
pub type RunOutput = Vec<(String, Table)>;

/// Path `<stem><suffix>.csv` next to the scenario's main output.
fn sibling(output: &str, suffix: &str) -> String {
    let p = Path::new(output);
    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = format!("{stem}{suffix}.csv");
    match p.parent().filter(|d| !d.as_os_str().is_empty()) {
        Some(d) => d.join(name).to_string_lossy().into_owned(),
        None => name,
    }
}

pub fn run(scenario: &Scenario, ctx: &RunContext) -> Result<RunOutput, CliError> {
    match &scenario.params {
        Params::Expand(p) => run_expand(scenario, p),
        Params::SwapChain(p) => run_swap_chain(scenario, p),
        Params::Range(p) => run_range(scenario, p, ctx),
        Params::Hyperfine(p) => run_hyperfine(scenario, p),
        Params::Fidelity(p) => run_fidelity(scenario, p),
        Params::Interactions(p) => run_interactions(scenario, p),
    }
}

fn species(input: &SpeciesInput) -> Result<SpeciesSpec, CliError> {
    let mass = match (input.mass, &input.name) {
        (Some(m), _) => m,
        (None, Some(n)) => known_mass(n).ok_or_else(|| CliError::Schema(format!("unknown species `{n}`; give `mass`")))?,
        (None, None) => return Err(CliError::Schema("species needs `name` or `mass`".into())),
    };
    let s = SpeciesSpec { name: input.name.clone(), mass, trap: input.trap.axes() };
    s.validate()?;
    Ok(s)
}

fn axis(name: &str) -> Result<Axis, CliError> {
    match name {
        "x" => Ok(Axis::X),
        "y" => Ok(Axis::Y),
        "z" => Ok(Axis::Z),
        other => Err(CliError::Schema(format!("unknown axis `{other}`"))),
    }
}

fn coefficient_rows(t: &mut Table, section: &str, c: &Coefficients, unit2: &str, unit1: &str) {
    for (label, v, unit) in
        [("x", c.x, unit2), ("y_linear", c.y_linear, unit1), ("y", c.y, unit2), ("z", c.z, unit2), ("xz", c.xz, unit2)]
    {
        t.push(row![section, label, v, unit, false]);
    }
}

fn run_expand(s: &Scenario, p: &ExpandParams) -> Result<RunOutput, CliError> {
    let mut t = Table::new(&["section", "label", "value", "unit", "x2pi"]);
    let r = p.r.get();
    if let Some(pot) = &p.potential {
        let pot = RadialAngularPotential::new(pot.amplitude, pot.alpha, pot.a, pot.b, pot.c);
        let (mol, atom) = (
            species(p.molecule.as_ref().expect("validated"))?,
            species(p.atom.as_ref().expect("validated"))?,
        );
        let closed = expand_closed_form(&pot, r)?;
        t.push(row!["potential", "V", closed.potential, "kHz", true]);
        coefficient_rows(&mut t, "normalized", &closed.normalized, "", "");
        coefficient_rows(&mut t, "coefficient", &closed.coefficients, "kHz/um^2", "kHz/um");
        if let Some(h) = p.step {
            let fd = expand_finite_difference(&pot, r, h.get())?;
            coefficient_rows(&mut t, "finite_difference", &fd.coefficients, "kHz/um^2", "kHz/um");
        }
        let pc = phonon_couplings(&pot, r, &mol, &atom)?;
        t.push(row!["coupling", "linear_y", pc.linear_y, "kHz", true]);
        for ax in &pc.axes {
            let n = ax.axis.name();
            t.push(row!["coupling", format!("d2V_{n}"), ax.second_derivative, "kHz/um^2", true]);
            t.push(row!["coupling", format!("g_am_{n}"), ax.g_am, "kHz", true]);
            t.push(row!["coupling", format!("g_a_{n}"), ax.g_a, "kHz", true]);
            t.push(row!["coupling", format!("g_m_{n}"), ax.g_m, "kHz", true]);
        }
    }
    for block in &p.anharmonicity {
        let ax = axis(&block.axis)?;
        let list: Vec<SpeciesSpec> = block
            .species
            .iter()
            .map(|n| SpeciesSpec::named(n, block.trap.get()).ok_or_else(|| CliError::Schema(format!("unknown species `{n}`"))))
            .collect::<Result<_, _>>()?;
        for i in 0..list.len() {
            for j in i..list.len() {
                let v = anharmonicity(&list[i], &list[j], r, ax)?;
                let label = if i == j { block.species[i].clone() } else { format!("{}-{}", block.species[i], block.species[j]) };
                t.push(row!["anharmonicity", label, v, "", false]);
            }
        }
    }
    Ok(vec![(s.output.clone(), t)])
}

fn run_swap_chain(s: &Scenario, p: &SwapChainParams) -> Result<RunOutput, CliError> {
    let g = p.g_am.get();
    let jobs: Vec<(&ChainCase, f64)> = p.cases.iter().flat_map(|c| p.eta.0.iter().map(move |&e| (c, e))).collect();
    let results: Vec<Result<Vec<_>, CliError>> = jobs
        .par_iter()
        .map(|(case, eta)| {
            let spec = ChainSpec {
                n: p.n,
                g_aa: case.g_aa_over_g_am * g,
                g_mm: case.g_mm_over_g_am * g,
                g_am: g,
                eta: *eta,
                alpha: case.alpha,
                omega_z: case.omega_over_g * g.abs(),
                initial_molecule_occupation: p.occupation,
                model: match p.model {
                    ModelInput::Full => ChainModel::Full,
                    ModelInput::Rwa => ChainModel::RotatingWave,
                },
                initial: match p.initial {
                    InitialInput::Thermal => InitialState::Thermal,
                    InitialInput::Coherent => InitialState::Coherent,
                },
            };
            let run = simulate_swap(&spec)?;
            Ok(row![
                case.label.as_str(),
                p.n,
                case.alpha,
                case.omega_over_g,
                case.g_aa_over_g_am,
                case.g_mm_over_g_am,
                *eta,
                g,
                true,
                run.swap_time,
                run.efficiency,
            ])
        })
        .collect();
    let mut t = Table::new(&[
        "label",
        "N",
        "alpha",
        "omega_over_g",
        "g_aa_over_g_am",
        "g_mm_over_g_am",
        "eta",
        "g_am_khz",
        "x2pi",
        "swap_time_ms",
        "efficiency",
    ]);
    for r in results {
        t.push(r?);
    }
    Ok(vec![(s.output.clone(), t)])
}

fn run_range(s: &Scenario, p: &RangeParams, ctx: &RunContext) -> Result<RunOutput, CliError> {
    let threshold = critical_ratio(p.target)?;
    let mut t = Table::new(&[
        "label",
        "ratio_ref",
        "r_ref_um",
        "power",
        "target",
        "threshold",
        "r095_um",
        "feasible",
        "leroy_half_um",
        "r_eff_um",
        "r_eff_rel_dev",
        "gamma_r_per_ms",
        "gamma_lr_per_ms",
        "gamma_rel_dev",
        "surviving_ref",
        "mc_surviving_ref",
        "mc_stderr",
    ]);
    for (k, row) in p.rows.iter().enumerate() {
        let g = row.g.map(|q| q.get());
        let ratio = match (row.ratio, g, row.gamma_r) {
            (Some(x), _, _) => x,
            (None, Some(g), Some(gamma)) => coupling_decay_ratio(g, gamma.get()),
            _ => unreachable!("validated at parse time"),
        };
        let leroy = row.leroy_half.map(|q| q.get()).unwrap_or(0.0);
        let spec = RangeSpec { label: row.label.clone(), ratio_ref: ratio, r_ref: row.r_ref.get(), power: row.power, leroy_half: leroy };
        let report = swap_range(&spec, threshold)?;
        let r_eff = match (g, row.g_lr) {
            (Some(g), Some(glr)) => Some(rydswap_core::swap::power_law_distance(g, spec.r_ref, glr.get(), row.power)?),
            _ => None,
        };
        let r_dev = r_eff.zip(row.leroy_half).map(|(re, l)| re / l.get() - 1.0);
        let gamma_ref = row.gamma_r.map(|q| q.get()).or(g.map(|g| 2.0 * std::f64::consts::PI * g / ratio));
        let gamma_lr = row.g_lr.zip(row.ratio_lr).map(|(glr, x)| 2.0 * std::f64::consts::PI * glr.get() / x);
        let gamma_dev = gamma_ref.zip(gamma_lr).map(|(a, b)| b / a - 1.0);
        let surviving = surviving_fraction(ratio, 1.0)?;
        let (mc, se) = match &p.monte_carlo {
            Some(mc) => {
                let (m, e) = surviving_fraction_monte_carlo(ratio, 1.0, mc.samples, ctx.seed.wrapping_add(k as u64))?;
                (Some(m), Some(e))
            }
            None => (None, None),
        };
        t.push(row![
            row.label.as_str(),
            ratio,
            spec.r_ref,
            row.power,
            p.target,
            threshold,
            report.r_095,
            report.feasible,
            row.leroy_half.map(|q| q.get()),
            r_eff,
            r_dev,
            gamma_ref,
            gamma_lr,
            gamma_dev,
            surviving,
            mc,
            se,
        ]);
    }
    Ok(vec![(s.output.clone(), t)])
}

fn run_hyperfine(s: &Scenario, p: &HyperfineParams) -> Result<RunOutput, CliError> {
    let spec = p.molecule.spec().map_err(CliError::Schema)?;
    spec.validate()?;
    let b = p.b.get();
    let mut levels = Table::new(&[
        "N",
        "index",
        "energy_khz",
        "x2pi",
        "total_projection",
        "dominant",
        "dominant_weight",
        "mixing",
    ]);
    let mut purity = Table::new(&["N", "state", "purity", "energy_khz", "x2pi"]);
    for &n in &p.n.0 {
        let rep = spectrum(n, &spec, SpectrumOptions { b_mt: b, m_n: p.m_n })?;
        for k in 0..rep.eigenvalues.len() {
            levels.push(row![
                n,
                k,
                rep.eigenvalues[k],
                true,
                rep.total_projection[k].to_string(),
                rep.dominant[k].label(),
                rep.dominant_weight[k],
                rep.mixing[k],
            ]);
        }
        for sp in stretched_state_purity_at(n, &spec, b)? {
            purity.push(row![n, sp.state.label(), sp.purity, sp.energy, true]);
        }
    }
    let mut out = vec![(s.output.clone(), levels), (sibling(&s.output, "_purity"), purity)];
    if !p.dressing.is_empty() {
        let mut t = Table::new(&[
            "n_low",
            "n_high",
            "m_n",
            "b_mt",
            "rabi_khz",
            "x2pi",
            "range_khz",
            "epsilon",
            "deviation",
            "epsilon_std",
        ]);
        for d in &p.dressing {
            let r = dressing_deviation_with(d.n_low, d.n_high, &spec, b, d.rabi.get(), d.m_n)?;
            t.push(row![r.n_low, r.n_high, r.m_n, r.b_mt, r.rabi, true, r.range, r.epsilon, r.deviation, r.epsilon_std]);
        }
        out.push((sibling(&s.output, "_dressing"), t));
    }
    Ok(out)
}

/// Fidelity table over the product of the three grids.
pub fn fidelity_table(p: &FidelityParams) -> Result<Table, CliError> {
    let mut points = Vec::new();
    for &a2 in &p.a2.0 {
        for &n in &p.n.0 {
            for &e in &p.epsilon.0 {
                points.push((a2, n, e));
            }
        }
    }
    let rows: Vec<Result<_, CliError>> = points
        .par_iter()
        .map(|&(a2, n, e)| {
            let f = fidelity(&QubitPhononInput::from_population(a2, n, e)?)?;
            Ok(row![a2, n, e, f.exact, f.linearized, f.difference])
        })
        .collect();
    let mut t = Table::new(&["a2", "n", "epsilon", "fidelity", "linearized", "difference"]);
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

fn run_fidelity(s: &Scenario, p: &FidelityParams) -> Result<RunOutput, CliError> {
    Ok(vec![(s.output.clone(), fidelity_table(p)?)])
}

fn run_interactions(s: &Scenario, p: &InteractionsParams) -> Result<RunOutput, CliError> {
    let (theta, phi) = (p.theta.get(), p.phi.get());
    let channels: Vec<_> = p.channels.iter().map(ChannelInput::to_spec).collect();
    let atomic_state = p.atomic_state.as_ref().map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>());
    let opts = MixingOptions { phi, sign: p.sign, atomic_state: atomic_state.clone() };
    let mut t = Table::new(&[
        "tag",
        "r_um",
        "theta_rad",
        "phi_rad",
        "c6_khz_um6",
        "angular",
        "product_khz_um6",
        "x2pi",
        "mixing",
    ]);
    let mut scalars = Vec::with_capacity(channels.len());
    for ch in &channels {
        let c6 = c6_channel(ch)?;
        let m = angular_matrix(ch, p.sign, theta, phi)?;
        let dim = m.m_values.len();
        let state = match &atomic_state {
            Some(st) => {
                let norm = st.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if st.len() != dim || norm == 0.0 {
                    return Err(CliError::Schema(format!("`atomic_state` needs {dim} non-zero amplitudes for {}", ch.tag())));
                }
                st.iter().map(|z| z / norm).collect()
            }
            None => vec![Complex64::new((dim as f64).sqrt().recip(), 0.0); dim],
        };
        scalars.push((ch.tag(), c6, m.expectation(&state)?));
    }
    let total = rydswap_core::total_c6(&scalars.iter().map(|(_, c, d)| (*c, *d)).collect::<Vec<_>>())?;
    for r in &p.r.0 {
        let rep = mixing_fraction_with(&channels, r.get(), theta, &opts)?;
        for ((tag, c6, d), mix) in scalars.iter().zip(&rep.per_channel) {
            t.push(row![tag.as_str(), r.get(), theta, phi, *c6, *d, c6 * d, true, mix.fraction]);
        }
        t.push(row!["total", r.get(), theta, phi, None, None, total, true, rep.f_mix]);
    }
    Ok(vec![(s.output.clone(), t)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sibling_paths() {
        assert_eq!(sibling("a.csv", "_purity"), "a_purity.csv");
        assert_eq!(sibling("d/a.csv", "_x"), "d/a_x.csv");
    }
}
