use std::fmt::Write as _;
use std::sync::Arc;

use bosefermi::fock::{particle_hole_check, BosonModes, Couplings, ModeSet};
use bosefermi::lattice::{asymptotics_report, resolvent_sum_exact, FermiRadius, LuneSumTable};
use bosefermi::potentials::{
    coupling, effective_potential_kf, effective_potential_limit, sup_difference, FourierPotential, PotentialFile,
};
use bosefermi::scattering::{collapse_energy, energy_curve};
use bosefermi::spectra::{
    corollary_overlap, envelope_shape, quadratic_decomposition_check, theorem1_compare, CompareConfig, CutoffRule,
    EigenOptions,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{read_fourier, read_radial, SpectrumConfig};
use crate::output::{csv_header, emit, in_dir, json_document, num, opt_num};
use crate::{EffpotArgs, Format, LuneArgs, Outcome, ScatterArgs, SpectrumArgs};

fn radius(kf2: u64) -> bosefermi::Result<FermiRadius> {
    FermiRadius::from_kf2(kf2)
}

pub fn lune(a: &LuneArgs, table: &LuneSumTable) -> anyhow::Result<()> {
    let config = json!({ "k": a.k, "kf2": a.kf2, "alpha": a.alpha, "exact": a.exact, "sweep": a.sweep });
    if a.sweep {
        let radii = a.kf2.iter().map(|&n| radius(n)).collect::<bosefermi::Result<Vec<_>>>()?;
        let rows = asymptotics_report(&a.k, &radii, table)?;
        let mut text = csv_header("lune", &config);
        text.push_str("kx,ky,kz,kF_squared,kf,d1,d1_ratio,d1_normalized,d2,d2_normalized,large_k,d1_large_k\n");
        for r in rows {
            let [x, y, z] = r.k;
            writeln!(
                text,
                "{x},{y},{z},{},{},{},{},{},{},{},{},{}",
                r.kf_squared,
                num(r.kf),
                num(r.d1),
                num(r.d1_ratio),
                num(r.d1_normalized),
                num(r.d2),
                num(r.d2_normalized),
                r.large_k,
                num(r.d1_large_k)
            )?;
        }
        return emit(a.output.as_deref(), &text);
    }

    let (&[k], &[kf2]) = (a.k.as_slice(), a.kf2.as_slice()) else {
        return Err(Outcome::Usage("a single value needs exactly one --k and one --kf2; use --sweep for tables".into()).into());
    };
    let r = radius(kf2)?;
    let (value, count) = if a.exact {
        if a.alpha.fract() != 0.0 || a.alpha < 0.0 {
            return Err(Outcome::Usage("--exact needs a nonnegative integer alpha".into()).into());
        }
        let q = resolvent_sum_exact(a.alpha as u32, k, kf2)?;
        (q.to_string(), bosefermi::lattice::lune_points(k, r).len() as u64)
    } else {
        let s = table.get(a.alpha, k, r);
        (s.value.to_string(), s.count)
    };
    match &a.output {
        None => emit(None, &format!("{value}\n")),
        Some(path) => {
            let mut text = csv_header("lune", &config);
            text.push_str("alpha,kx,ky,kz,kF_squared,value,count\n");
            writeln!(text, "{},{},{},{},{kf2},{value},{count}", num(a.alpha), k[0], k[1], k[2])?;
            emit(Some(path), &text)
        }
    }
}

#[derive(Serialize)]
struct EffpotRow {
    #[serde(rename = "kF_squared")]
    kf_squared: u64,
    /// `(k, coefficient)` pairs of `W_{k_F}` in the stored normalization.
    coefficients: Vec<(i64, i64, i64, f64)>,
    value_at_origin: f64,
    sup_difference: f64,
    sup_grid_lower_bound: f64,
    /// `sup_difference / ((ln k_F)^{5/3} k_F^{−1/3} ‖V‖²_{H²})`.
    normalized: f64,
}

fn coefficient_list(v: &FourierPotential) -> Vec<(i64, i64, i64, f64)> {
    match PotentialFile::from_fourier(v) {
        PotentialFile::Fourier { coeffs, .. } => coeffs,
        PotentialFile::Radial(_) => unreachable!(),
    }
}

pub fn effpot(a: &EffpotArgs, table: &LuneSumTable) -> anyhow::Result<()> {
    let (v_file, v) = read_fourier(&a.v)?;
    let w = match &a.w {
        Some(p) => Some(read_fourier(p)?),
        None => None,
    };
    if a.kf2.is_empty() && !a.limit {
        return Err(Outcome::Usage("give --kf2 values, --limit, or both".into()).into());
    }
    let config = json!({
        "V": v_file,
        "W": w.as_ref().map(|(f, _)| f),
        "kf2": a.kf2,
        "limit": a.limit,
        "format": format!("{:?}", a.format).to_lowercase(),
    });
    let h2 = v.h_norm_sq(2.0);
    let mut rows = Vec::with_capacity(a.kf2.len());
    for &n in &a.kf2 {
        let r = radius(n)?;
        let eff = effective_potential_kf(&v, r, table);
        let sup = sup_difference(&v, r, table);
        let scale = envelope_shape(r.kf()) * h2;
        rows.push(EffpotRow {
            kf_squared: n,
            coefficients: coefficient_list(&eff.potential),
            value_at_origin: eff.value_at_origin(),
            sup_difference: sup.l1_bound,
            sup_grid_lower_bound: sup.grid_lower_bound,
            normalized: if scale > 0.0 { sup.l1_bound / scale } else { 0.0 },
        });
    }
    let limit = a.limit.then(|| {
        let w = w.as_ref().map(|(_, w)| w.clone()).unwrap_or_else(|| FourierPotential::zero(v.cutoff()));
        let eff = effective_potential_limit(&v, &w);
        json!({ "coefficients": coefficient_list(&eff.potential), "value_at_origin": eff.value_at_origin() })
    });
    let text = match a.format {
        Format::Json => json_document("effpot", &config, json!({ "rows": rows, "limit": limit }))?,
        Format::Csv => {
            let mut text = csv_header("effpot", &config);
            text.push_str("kF_squared,value_at_origin,sup_difference,sup_grid_lower_bound,normalized\n");
            for r in &rows {
                writeln!(
                    text,
                    "{},{},{},{},{}",
                    r.kf_squared,
                    num(r.value_at_origin),
                    num(r.sup_difference),
                    num(r.sup_grid_lower_bound),
                    num(r.normalized)
                )?;
            }
            text
        }
    };
    emit(a.output.as_deref(), &text)
}

pub fn scatter(a: &ScatterArgs) -> anyhow::Result<()> {
    let (w_file, w) = read_radial(&a.w)?;
    let (v_file, v) = read_radial(&a.v)?;
    let psi = match &a.psi {
        Some(p) if a.collapse => Some(read_radial(p)?),
        _ => None,
    };
    let config = json!({
        "w": w_file,
        "v": v_file,
        "g": a.g.0,
        "collapse": a.collapse,
        "psi": psi.as_ref().map(|(f, _)| f),
        "N": a.n,
        "collapse_g": a.collapse_g,
    });
    let mut diagram = energy_curve(&w, &v, &a.g.0)?;
    let mut tables = Vec::new();
    if let Some((_, psi)) = &psi {
        let gs = if a.collapse_g.is_empty() { vec![1.5 * diagram.couplings.g_star] } else { a.collapse_g.clone() };
        for g in gs {
            let t = collapse_energy(psi, &w, &v, g, &a.n)?;
            diagram.collapse_slopes.push((g, t.slope));
            tables.push(t);
        }
    }

    let mut csv = csv_header("scatter", &config);
    csv.push_str("g,a,4pi_a,eg2,flag\n");
    for p in &diagram.points {
        writeln!(csv, "{},{},{},{},{}", num(p.g), opt_num(p.a), opt_num(p.four_pi_a), num(p.eg2), p.flag.as_str())?;
    }
    let c = &diagram.couplings;
    let summary = json!({
        "g0": c.g0,
        "g_star": c.g_star,
        "g_star_sqrt": c.g_star_sqrt,
        "note": "g_star is w(0)/|v|^2; w_g(0) changes sign at g_star_sqrt",
        "collapse_slopes": diagram.collapse_slopes,
        "collapse": tables,
    });
    let summary = json_document("scatter", &config, summary)?;
    match &a.out_dir {
        Some(dir) => {
            emit(Some(&in_dir(dir, "scatter.csv")), &csv)?;
            emit(Some(&in_dir(dir, "summary.json")), &summary)
        }
        None => emit(None, &(csv + "\n" + &summary)),
    }
}

#[derive(Serialize)]
struct PhCheck {
    n_bosons: usize,
    dim: usize,
    residual: f64,
    conjugated_residual: f64,
    pass: bool,
}

/// Particle-hole identity on the six-mode test space `{0, ±e₁, ±(e₁+e₂), 2e₁}` at `k_F = 1`.
fn particle_hole_lines(v: &FourierPotential, w: &FourierPotential, n_bosons: usize) -> anyhow::Result<Vec<PhCheck>> {
    let r = radius(1)?;
    let modes = Arc::new(ModeSet::new(vec![[0, 0, 0], [1, 0, 0], [-1, 0, 0], [1, 1, 0], [-1, -1, 0], [2, 0, 0]], r)?);
    let bosons = Arc::new(BosonModes::new(vec![[0, 0, 0], [1, 0, 0], [-1, 0, 0]])?);
    let mut out = Vec::new();
    for n in 1..=n_bosons.min(2) {
        let c = Couplings { lambda: coupling(n, r), v: v.clone(), w: w.clone() };
        let rep = particle_hole_check(modes.clone(), bosons.clone(), n, &c)?;
        let pass = rep.residual <= 1e-10 && rep.conjugated_residual <= 1e-10;
        eprintln!(
            "particle-hole N={n} dim={}: residual {:e}, conjugated {:e} ({})",
            rep.dim,
            rep.residual,
            rep.conjugated_residual,
            if pass { "pass" } else { "FAIL" }
        );
        out.push(PhCheck { n_bosons: n, dim: rep.dim, residual: rep.residual, conjugated_residual: rep.conjugated_residual, pass });
    }
    Ok(out)
}

pub fn spectrum(a: &SpectrumArgs, table: &LuneSumTable) -> anyhow::Result<()> {
    if let Some(bad) = a.check.iter().find(|c| c.as_str() != "ph") {
        return Err(Outcome::Usage(format!("unknown check `{bad}`")).into());
    }
    let cfg = SpectrumConfig::load(&a.config)?;
    let v = cfg.v.fourier()?;
    let w = cfg.w.fourier()?;
    let bosons = cfg.bosons.build()?;
    let eigen = EigenOptions { tol: cfg.tol, seed: cfg.seed, ..EigenOptions::default() };
    let rule = CutoffRule::from(cfg.cutoff);
    let compare = CompareConfig {
        v: v.clone(),
        w: w.clone(),
        n_bosons: cfg.n_bosons,
        bosons: bosons.clone(),
        rule,
        max_pairs: cfg.max_pairs,
        n: cfg.eigenvalues,
        sector: cfg.sector,
        eigen,
        q_exponent: cfg.q_exponent.unwrap_or(f64::INFINITY),
    };
    let rows = theorem1_compare(&compare, &cfg.kf2, table)?;
    for r in &rows {
        if let Some(e) = &r.error {
            eprintln!("row k_F² = {}: {e}", r.kf_squared);
        }
    }

    let mut overlaps = Vec::new();
    for &n in &cfg.overlap {
        let r = radius(n)?;
        let o = corollary_overlap(&v, &w, cfg.n_bosons, r, rule.cutoff2(r), cfg.max_pairs, &bosons, cfg.sector, eigen);
        overlaps.push(match o {
            Ok(o) => serde_json::to_value(o)?,
            Err(e) => json!({ "kF_squared": n, "error": e.to_string() }),
        });
    }

    let decomposition = match &cfg.decomposition {
        Some(d) => Some(quadratic_decomposition_check(&v, d.n_bosons, radius(d.kf2)?, d.cutoff2, d.bosons.build()?)?),
        None => None,
    };
    let ph = if a.check.iter().any(|c| c == "ph") { Some(particle_hole_lines(&v, &w, cfg.n_bosons)?) } else { None };

    let config: Value = serde_json::to_value(&cfg)?;
    let result = json!({
        "rows": rows,
        "overlap": overlaps,
        "decomposition": decomposition,
        "checks": { "ph": ph },
    });
    emit(a.output.as_deref(), &json_document("spectrum", &config, result)?)?;

    if rows.iter().all(|r| !r.is_ok()) {
        return Err(Outcome::Capacity("every comparison row failed".into()).into());
    }
    if ph.is_some_and(|p| p.iter().any(|c| !c.pass)) {
        return Err(Outcome::Failed("particle-hole residual above 1e-10".into()).into());
    }
    Ok(())
}
