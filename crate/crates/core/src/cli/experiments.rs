use std::f64::consts::{E, PI, TAU};
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{
    BoundaryConfig, Experiment, ExperimentConfig, ModelmapConfig, RenderConfig, SilhouetteConfig,
    TrichotomyConfig,
};
use super::export::{
    export_boundary_trace, export_distance_trace, export_points, export_table, fmt_f64,
};
use super::render::foliation_svg;
use super::{write_json, CliError, Recorder, Stop};
use crate::boundary::{
    convergence_class, delta_sequence, harnack_check, loop_length_bound, shadowing_check,
    topological_hull, BoundaryCase, PlaneRegion, SyntheticSystem, SystemFamily,
};
use crate::hypgeo::{degree_bound, max_winding, CanonicalDomain, LogPolarPoint};
use crate::modelmap::{
    generate_params_with, invariant_checks, phi, winding_number, ModelLab, SampledCurve,
};
use crate::silhouette::{
    classify_silhouette, eventual_connectivity, feasible_degrees, modulus_growth, riemann_hurwitz,
    Connectivity, ConnectivitySignature, DynamicsClass, RHInstance, SignatureEntry,
    SilhouetteError,
};
use crate::tower::{
    circle_collapse_bound, h_value, pair_distance, pair_distance_with_threshold, sample_pair,
    trichotomy_report, PairKind, PowerTower, TrichotomyReport, Verdict, DEEP_STAGE,
};

type Outcome = Result<(), Stop>;
type WindingCase = (
    &'static str,
    &'static dyn Fn(Complex64) -> Complex64,
    f64,
    i64,
);

/// Collapse ratio `d_N/d_0` required of same-circle pairs.
const COLLAPSE_RATIO: f64 = 1e-4;
const ISOMETRY_TOL: f64 = 1e-10;
const DEEP_LIMIT_TOL: f64 = 1e-6;
const BOUND_SLACK: f64 = 1e-9;
const UNIT_CIRCLE_TOL: f64 = 1e-4;
const LOOP_SEGMENTS: usize = 256;
const REFERENCE_STAGES: usize = 40;
const TOWER_REFERENCE_STAGES: usize = 9;

pub(crate) fn run_one(
    e: Experiment,
    cfg: &ExperimentConfig,
    dir: &Path,
    rec: &mut Recorder,
) -> Outcome {
    match e {
        Experiment::Trichotomy => trichotomy(&cfg.trichotomy, rng(cfg.seed, 1), dir, rec),
        Experiment::Modelmap => modelmap(&cfg.modelmap, dir, rec),
        Experiment::Silhouette => silhouette(&cfg.silhouette, dir, rec),
        Experiment::Boundary => boundary(&cfg.boundary, rng(cfg.seed, 4), dir, rec),
        Experiment::Render => render(&cfg.render, dir, rec),
        Experiment::All => {
            for each in Experiment::EACH {
                run_one(each, cfg, &dir.with_file_name(each.name()), rec)?;
            }
            Ok(())
        }
    }
}

/// Independent stream per experiment so that `all` and a single run agree.
fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn failures<T>(items: &[(usize, Result<T, String>)]) -> Vec<String> {
    items
        .iter()
        .filter_map(|(i, r)| r.as_ref().err().map(|e| format!("#{i}: {e}")))
        .collect()
}

fn summary(bad: &[String], total: usize) -> (bool, String) {
    match bad.first() {
        None => (true, format!("{total}/{total}")),
        Some(first) => (
            false,
            format!("{}/{total} failed, first {first}", bad.len()),
        ),
    }
}

// ---------------------------------------------------------------- trichotomy

fn kind_name(kind: PairKind) -> &'static str {
    match kind {
        PairKind::SameCircle => "same_circle",
        PairKind::SameRay => "same_ray",
        PairKind::Generic => "generic",
    }
}

/// Checks of one pair beyond the verdict itself.
fn pair_checks(
    tower: &PowerTower,
    pair: (LogPolarPoint, LogPolarPoint),
    kind: PairKind,
    rep: &TrichotomyReport,
) -> Result<(), String> {
    let d0 = rep.trace.entries[0].distance;
    let dn = rep.trace.limit_estimate;
    match kind {
        PairKind::SameCircle => {
            // The trace switches to the asymptotic value past the exactness
            // threshold, so the last stage is also evaluated with deck minimisation.
            let n = rep.trace.entries.len() - 1;
            let exact = pair_distance_with_threshold(tower, pair.0, pair.1, n, f64::INFINITY)
                .map_err(|e| e.to_string())?
                .value;
            let bound =
                circle_collapse_bound(tower, pair.0.u.exp(), n).map_err(|e| e.to_string())?;
            for d in [dn, exact] {
                if d.is_nan() || d >= COLLAPSE_RATIO * d0 {
                    return Err(format!(
                        "d_N = {d:e} is not below {COLLAPSE_RATIO:e} d_0 = {d0:e}"
                    ));
                }
            }
            if exact > bound * (1.0 + BOUND_SLACK) {
                return Err(format!(
                    "exact d_N = {exact:e} exceeds collapse bound {bound:e}"
                ));
            }
        }
        PairKind::SameRay => {
            let dev = rep
                .trace
                .entries
                .iter()
                .map(|e| (e.distance - d0).abs())
                .fold(0.0, f64::max);
            if dev.is_nan() || dev >= ISOMETRY_TOL {
                return Err(format!("max |d_n - d_0| = {dev:e}"));
            }
        }
        PairKind::Generic => {
            if (rep.deep_stage_distance - rep.limit).abs().is_nan()
                || (rep.deep_stage_distance - rep.limit).abs() > DEEP_LIMIT_TOL
            {
                return Err(format!(
                    "deep distance {} vs limit {}",
                    rep.deep_stage_distance, rep.limit
                ));
            }
            if !(rep.reverse_triangle_bound - BOUND_SLACK <= rep.limit
                && rep.limit <= d0 + BOUND_SLACK)
            {
                return Err(format!(
                    "limit {} outside [{}, {d0}]",
                    rep.limit, rep.reverse_triangle_bound
                ));
            }
        }
    }
    Ok(())
}

fn expected_verdict(kind: PairKind, rep: &TrichotomyReport) -> Verdict {
    match kind {
        PairKind::SameCircle => Verdict::Contracting,
        PairKind::SameRay => Verdict::Isometric,
        PairKind::Generic if rep.rays_merge_at.is_some() => Verdict::Isometric,
        PairKind::Generic => Verdict::SemiContracting,
    }
}

fn trichotomy(
    cfg: &TrichotomyConfig,
    mut rng: ChaCha8Rng,
    dir: &Path,
    rec: &mut Recorder,
) -> Outcome {
    let stages = cfg.stages.max(DEEP_STAGE);
    let Some(tower) = rec.require(
        "trichotomy.tower",
        PowerTower::constant(cfg.r, cfg.degree, stages),
    )?
    else {
        return Ok(());
    };
    let log_r = tower.log_radius();
    let mut verdict_rows = Vec::new();
    for kind in [PairKind::SameCircle, PairKind::SameRay, PairKind::Generic] {
        let name = kind_name(kind);
        let mut results = Vec::with_capacity(cfg.pairs_per_class);
        let mut pairs = Vec::with_capacity(cfg.pairs_per_class);
        for i in 0..cfg.pairs_per_class {
            let (z, w) = sample_pair(&mut rng, kind, log_r);
            let outcome = trichotomy_report(&tower, z, w, cfg.stages).map_err(|e| e.to_string());
            let row_tail = match &outcome {
                Ok(rep) => {
                    export_distance_trace(
                        &rep.trace,
                        &dir.join("traces").join(format!("{name}_{i:03}.csv")),
                    )?;
                    vec![
                        format!("{:?}", rep.verdict),
                        fmt_f64(rep.trace.entries[0].distance),
                        fmt_f64(rep.trace.limit_estimate),
                        fmt_f64(rep.limit),
                        fmt_f64(rep.deep_stage_distance),
                        fmt_f64(rep.reverse_triangle_bound),
                    ]
                }
                Err(_) => {
                    let mut v = vec!["error".to_string()];
                    v.extend(std::iter::repeat_n(fmt_f64(f64::NAN), 5));
                    v
                }
            };
            let mut row = vec![
                name.to_string(),
                i.to_string(),
                fmt_f64(z.u),
                fmt_f64(z.theta),
                fmt_f64(w.u),
                fmt_f64(w.theta),
            ];
            row.extend(row_tail);
            verdict_rows.push(row);
            results.push((i, outcome));
            pairs.push((z, w));
        }
        let verdicts: Vec<(usize, Result<(), String>)> = results
            .iter()
            .map(|(i, r)| {
                let r = match r {
                    Ok(rep) if rep.class.kind != kind => {
                        Err(format!("classified as {:?}", rep.class.kind))
                    }
                    Ok(rep) if rep.verdict != expected_verdict(kind, rep) => {
                        Err(format!("verdict {:?}", rep.verdict))
                    }
                    Ok(_) => Ok(()),
                    Err(e) => Err(e.clone()),
                };
                (*i, r)
            })
            .collect();
        let (ok, detail) = summary(&failures(&verdicts), results.len());
        rec.check(format!("trichotomy.{name}.verdict"), ok, detail)?;

        let extra: Vec<(usize, Result<(), String>)> = results
            .iter()
            .filter_map(|(i, r)| {
                r.as_ref()
                    .ok()
                    .map(|rep| (*i, pair_checks(&tower, pairs[*i], kind, rep)))
            })
            .collect();
        let (ok, detail) = summary(&failures(&extra), extra.len());
        let label = match kind {
            PairKind::SameCircle => "collapse",
            PairKind::SameRay => "constant",
            PairKind::Generic => "limit",
        };
        rec.check(
            format!("trichotomy.{name}.{label}"),
            ok && extra.len() == results.len(),
            detail,
        )?;
        if let Some(worst) = results
            .iter()
            .filter_map(|(_, r)| r.as_ref().ok())
            .map(|rep| rep.trace.limit_estimate / rep.trace.entries[0].distance)
            .reduce(f64::max)
        {
            rec.metric(format!("trichotomy.{name}.max_final_ratio"), worst);
        }
    }
    export_table(
        &[
            "class",
            "pair",
            "zu",
            "ztheta",
            "wu",
            "wtheta",
            "verdict",
            "d0",
            "dN",
            "limit",
            "deep",
            "reverse_triangle",
        ],
        verdict_rows,
        &dir.join("verdicts.csv"),
    )?;
    leaf_coherence(&tower, &mut rng, rec)?;
    equality_case(cfg.r, &mut rng, rec)
}

/// Level sets of `log|z|/log|z0|` are exactly the circles `|z| = const`.
fn leaf_coherence(tower: &PowerTower, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Outcome {
    let log_r = tower.log_radius();
    let z0 = LogPolarPoint::new(0.5 * log_r, 0.0);
    let mut bad = Vec::new();
    for i in 0..100 {
        for kind in [PairKind::SameCircle, PairKind::Generic] {
            let (z, w) = sample_pair(rng, kind, log_r);
            match (h_value(tower, z, z0), h_value(tower, w, z0)) {
                (Ok(a), Ok(b)) => {
                    if (a == b) != (kind == PairKind::SameCircle) {
                        bad.push(format!("#{i} {kind:?}: h = {a} and {b}"));
                    }
                }
                (Err(e), _) | (_, Err(e)) => bad.push(format!("#{i}: {e}")),
            }
        }
    }
    let (ok, detail) = summary(&bad, 200);
    rec.check("trichotomy.h_level_sets", ok, detail)
}

/// `z³: A(R) → A(R³)` attains the winding bound and is a local isometry on rays.
fn equality_case(r: f64, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Outcome {
    let s = r.powi(3);
    let bound = degree_bound(r, s).map_err(|e| e.to_string());
    let winding = max_winding(r, s).map_err(|e| e.to_string());
    let ok = matches!((&bound, &winding), (Ok(b), Ok(3)) if (b - 3.0).abs() < 1e-12);
    rec.check(
        "trichotomy.degree_bound_equality",
        ok,
        format!("bound {bound:?}, winding {winding:?}"),
    )?;
    let Some(tower) = rec.require("trichotomy.cube_tower", PowerTower::constant(r, 3, 1))? else {
        return Ok(());
    };
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for i in 0..50 {
        let (z, w) = sample_pair(rng, PairKind::SameRay, tower.log_radius());
        match (
            pair_distance(&tower, z, w, 0),
            pair_distance(&tower, z, w, 1),
        ) {
            (Ok(a), Ok(b)) => worst = worst.max((a.value - b.value).abs()),
            (Err(e), _) | (_, Err(e)) => bad.push(format!("#{i}: {e}")),
        }
    }
    rec.metric("trichotomy.cube_step_max_change", worst);
    rec.check(
        "trichotomy.cube_step_isometry",
        bad.is_empty() && worst < ISOMETRY_TOL,
        format!(
            "max change {worst:e}{}",
            bad.first().map(|b| format!(", {b}")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------- modelmap

#[derive(Serialize)]
struct Certification<'a> {
    invariants: &'a [crate::modelmap::InvariantCheck],
    containment: Vec<serde_json::Value>,
    windings: Vec<WindingRecord>,
    audits: Vec<serde_json::Value>,
}

#[derive(Serialize)]
struct WindingRecord {
    map: &'static str,
    radius: f64,
    expected: i64,
    result: Result<i64, String>,
}

fn to_value<T: Serialize>(r: &Result<T, String>) -> serde_json::Value {
    match r {
        Ok(v) => serde_json::to_value(v).unwrap_or(serde_json::Value::Null),
        Err(e) => serde_json::json!({ "error": e }),
    }
}

fn modelmap(cfg: &ModelmapConfig, dir: &Path, rec: &mut Recorder) -> Outcome {
    let Some(params) = rec.require(
        "modelmap.generate_params",
        generate_params_with(cfg.r, cfg.eps, cfg.margin, cfg.cycles),
    )?
    else {
        return Ok(());
    };
    rec.check(
        "modelmap.generate_params",
        true,
        format!("lambda {}, R {}", params.lambda, params.big_r),
    )?;
    write_json(&params, &dir.join("params.json"))?;

    let invariants = invariant_checks(&params);
    let broken: Vec<&str> = invariants
        .iter()
        .filter(|c| !c.holds)
        .map(|c| c.name.as_str())
        .collect();
    rec.check(
        "modelmap.invariants",
        broken.is_empty(),
        if broken.is_empty() {
            format!("{} hold", invariants.len())
        } else {
            broken.join("; ")
        },
    )?;

    let Some(lab) = rec.require("modelmap.component", ModelLab::new(params.clone()))? else {
        return Ok(());
    };
    export_points(
        &lab.component().boundary_points().collect::<Vec<_>>(),
        &dir.join("component_boundary.csv"),
    )?;

    let mut containment = Vec::new();
    for n in 0..params.stages() {
        let r = lab
            .verify_containment(n, cfg.samples)
            .map_err(|e| e.to_string());
        let (ok, detail) = match &r {
            Ok(rep) => {
                rec.metric(
                    format!("modelmap.stage_{n}.certified_clearance"),
                    rep.certified_clearance,
                );
                (
                    rep.passed,
                    format!(
                        "certified {:e} >= {:e}",
                        rep.certified_clearance, rep.required
                    ),
                )
            }
            Err(e) => (false, e.clone()),
        };
        containment.push(to_value(&r));
        rec.check(format!("modelmap.containment.stage_{n}"), ok, detail)?;
    }

    fn cube(z: Complex64) -> Complex64 {
        z * z * z
    }
    let origin = Complex64::new(0.0, 0.0);
    let cases: [WindingCase; 3] = [
        ("z^3", &cube, 1.0, 3),
        ("phi", &phi, 3.0, -1),
        ("phi", &phi, 0.5, 1),
    ];
    let mut windings = Vec::new();
    for (i, (map, f, radius, expected)) in cases.into_iter().enumerate() {
        let result = winding_number(f, &SampledCurve::circle(origin, radius, 512), origin)
            .map_err(|e| e.to_string());
        let ok = result.as_ref() == Ok(&expected);
        rec.check(
            format!("modelmap.winding.{i}"),
            ok,
            format!("{map} on |z| = {radius}: {result:?}, want {expected}"),
        )?;
        windings.push(WindingRecord {
            map,
            radius,
            expected,
            result,
        });
    }

    let expected = [(false, 1), (true, 2), (true, 1), (false, 1)];
    let mut audits = Vec::new();
    for k in 0..params.cycles {
        let r = lab.connectivity_audit(k).map_err(|e| e.to_string());
        let (ok, detail) = match &r {
            Ok(rep) => {
                let got: Vec<(bool, u32)> = rep
                    .stages
                    .iter()
                    .map(|s| (s.topology.bounded, s.topology.connectivity))
                    .collect();
                (got == expected, format!("(bounded, connectivity) {got:?}"))
            }
            Err(e) => (false, e.clone()),
        };
        audits.push(to_value(&r));
        rec.check(format!("modelmap.audit.cycle_{k}"), ok, detail)?;
    }
    write_json(
        &Certification {
            invariants: &invariants,
            containment,
            windings,
            audits,
        },
        &dir.join("certification.json"),
    )?;
    Ok(())
}

// ---------------------------------------------------------------- silhouette

fn brute_force_degrees(k: u64, limit: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for m in 1..=limit {
        for delta in 0..=limit {
            let c = riemann_hurwitz(RHInstance {
                c_v: Connectivity::Finite(k),
                degree: Connectivity::Finite(m),
                delta,
            });
            if c == Ok(Connectivity::Finite(k)) {
                out.push((m, delta));
            }
        }
    }
    out
}

fn constant_signature(source: &str, k: Connectivity, len: usize) -> ConnectivitySignature {
    ConnectivitySignature::periodic(source, &[(k, true)], len)
}

#[derive(Serialize)]
struct VerdictLine<'a> {
    row: &'a str,
    expected: DynamicsClass,
    verdict: Result<crate::silhouette::DynamicsVerdict, String>,
}

fn silhouette(cfg: &SilhouetteConfig, dir: &Path, rec: &mut Recorder) -> Outcome {
    let mut bad = Vec::new();
    for k in 3..=cfg.max_k {
        let brute = brute_force_degrees(k, 100);
        match feasible_degrees(k) {
            Ok(set) if set.iter().copied().eq(brute.iter().copied()) && brute == [(1, 0)] => {}
            Ok(set) => bad.push(format!("k = {k}: {set:?} vs brute force {brute:?}")),
            Err(e) => bad.push(format!("k = {k}: {e}")),
        }
    }
    let (ok, detail) = summary(&bad, (cfg.max_k - 2) as usize);
    rec.check("silhouette.feasible_degrees", ok, detail)?;

    let n = cfg.length;
    let f = Connectivity::Finite;
    let growing = modulus_growth(2.0 * 2f64.ln(), &vec![2; n - 1]).map_err(|e| e.to_string());
    let constant = vec![2.0 * 2f64.ln(); n];
    let mut baker_inf = constant_signature("baker", f(2), n);
    baker_inf.entries[0].connectivity = Connectivity::Infinite;
    let rows: Vec<(
        &str,
        DynamicsClass,
        Result<crate::silhouette::DynamicsVerdict, SilhouetteError>,
    )> = vec![
        (
            "k4",
            DynamicsClass::EventuallyIsometric,
            classify_silhouette(&constant_signature("k4", f(4), n), None, false),
        ),
        (
            "k2_constant_modulus",
            DynamicsClass::EventuallyIsometric,
            classify_silhouette(&constant_signature("k2", f(2), n), Some(&constant), false),
        ),
        (
            "k2_growing_modulus",
            DynamicsClass::Trimodal,
            match &growing {
                Ok(m) => classify_silhouette(&constant_signature("tower", f(2), n), Some(m), false),
                Err(e) => Err(SilhouetteError::Unclassifiable(e.clone())),
            },
        ),
        (
            "baker_finite",
            DynamicsClass::Trimodal,
            classify_silhouette(&constant_signature("baker", f(3), n), None, true),
        ),
        (
            "baker_infinite",
            DynamicsClass::Bimodal,
            classify_silhouette(&baker_inf, None, true),
        ),
    ];
    let mut lines = String::new();
    for (row, expected, verdict) in rows {
        let ok = match &verdict {
            Ok(v) => {
                v.class == expected
                    && match v.class {
                        DynamicsClass::Trimodal => {
                            v.contracting_lamination.is_some() && v.isometric_lamination.is_some()
                        }
                        DynamicsClass::Bimodal => v.contracting_lamination.is_some(),
                        _ => true,
                    }
            }
            Err(_) => false,
        };
        let verdict = verdict.map_err(|e| e.to_string());
        rec.check(format!("silhouette.row.{row}"), ok, format!("{verdict:?}"))?;
        let line = VerdictLine {
            row,
            expected,
            verdict,
        };
        lines.push_str(&serde_json::to_string(&line).map_err(|e| CliError::io(dir, e))?);
        lines.push('\n');
    }
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join("verdicts.jsonl");
    std::fs::write(&path, lines).map_err(|e| CliError::io(&path, e))?;

    let pattern = [(f(1), false), (f(2), true), (f(1), true), (f(1), false)];
    let period = eventual_connectivity(&ConnectivitySignature::periodic("model", &pattern, n));
    let ok = matches!(
        &period,
        Err(SilhouetteError::NoEventualConnectivity {
            period: Some(4),
            ..
        })
    );
    rec.check("silhouette.eventual.period_four", ok, format!("{period:?}"))?;

    let mut entries: Vec<SignatureEntry> = [5, 3]
        .iter()
        .map(|&k| SignatureEntry {
            connectivity: f(k),
            bounded: true,
        })
        .collect();
    entries.resize(
        n,
        SignatureEntry {
            connectivity: f(2),
            bounded: true,
        },
    );
    let settled = eventual_connectivity(&ConnectivitySignature::new("settling", entries));
    let ok = matches!(&settled, Ok(e) if e.k == f(2));
    rec.check(
        "silhouette.eventual.settles_at_two",
        ok,
        format!("{settled:?}"),
    )
}

// ---------------------------------------------------------------- boundary

fn sample_canonical(rng: &mut ChaCha8Rng, domain: CanonicalDomain) -> Complex64 {
    match domain {
        CanonicalDomain::UnitDisk => {
            Complex64::from_polar(0.99 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU))
        }
        CanonicalDomain::RightHalfPlane => {
            Complex64::new(rng.gen_range(0.01..10.0), rng.gen_range(-10.0..10.0))
        }
        CanonicalDomain::HorizontalStrip => {
            Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-1.5..1.5))
        }
        CanonicalDomain::Annulus(a) => {
            let u = 0.95 * a.log_radius() * rng.gen_range(-1.0..1.0);
            Complex64::from_polar(u.exp(), rng.gen_range(0.0..TAU))
        }
    }
}

fn family_name(f: SystemFamily) -> &'static str {
    match f {
        SystemFamily::DiskApproach => "disk_approach",
        SystemFamily::DiskAlternating => "disk_alternating",
        SystemFamily::StripContraction => "strip_contraction",
        SystemFamily::Tower { .. } => "tower",
    }
}

fn boundary(cfg: &BoundaryConfig, mut rng: ChaCha8Rng, dir: &Path, rec: &mut Recorder) -> Outcome {
    for (name, domain) in [
        ("disk", CanonicalDomain::UnitDisk),
        ("half_plane", CanonicalDomain::RightHalfPlane),
        ("strip", CanonicalDomain::HorizontalStrip),
    ] {
        let results: Vec<(usize, Result<(), String>)> = (0..cfg.harnack_pairs)
            .map(|i| {
                let (z, w) = (
                    sample_canonical(&mut rng, domain),
                    sample_canonical(&mut rng, domain),
                );
                let r = match harnack_check(domain, z, w) {
                    Ok(rep) if rep.holds => Ok(()),
                    Ok(rep) => Err(format!(
                        "ratio {} outside [{}, {}]",
                        rep.ratio, rep.lower, rep.upper
                    )),
                    Err(e) => Err(e.to_string()),
                };
                (i, r)
            })
            .collect();
        let (ok, detail) = summary(&failures(&results), results.len());
        rec.check(format!("boundary.harnack.{name}"), ok, detail)?;
    }

    let families = [
        SystemFamily::DiskApproach,
        SystemFamily::DiskAlternating,
        SystemFamily::StripContraction,
        SystemFamily::Tower { r: 2.0, degree: 2 },
    ];
    for family in families {
        let system = SyntheticSystem::new(family).map_err(|e| CliError::Config(e.to_string()))?;
        let stages = match family {
            SystemFamily::Tower { .. } => cfg.stages.min(TOWER_REFERENCE_STAGES),
            _ => cfg.stages,
        };
        let results: Vec<(usize, Result<(), String>)> = (0..cfg.pairs)
            .map(|i| {
                let (z0, z1) = (system.sample_point(&mut rng), system.sample_point(&mut rng));
                (
                    i,
                    shadowing_check(&system, z0, z1, stages)
                        .map(|_| ())
                        .map_err(|e| e.to_string()),
                )
            })
            .collect();
        let (ok, detail) = summary(&failures(&results), results.len());
        rec.check(
            format!("boundary.shadowing.{}", family_name(family)),
            ok,
            format!("N = {stages}, {detail}"),
        )?;
    }

    let disk = SyntheticSystem::new(SystemFamily::DiskApproach)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let example = shadowing_check(
        &disk,
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, 0.0),
        cfg.stages,
    );
    let want = 2.0 * 3f64.ln() * 9.0;
    let ok = matches!(&example, Ok(rep) if (rep.factor - want).abs() < 1e-9);
    let detail = match &example {
        Ok(rep) => format!("factor {} (want {want})", rep.factor),
        Err(e) => e.to_string(),
    };
    rec.check("boundary.shadowing.disk_example", ok, detail)?;

    loops(cfg, &mut rng, rec)?;
    reference_traces(cfg, dir, rec)
}

fn loops(cfg: &BoundaryConfig, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Outcome {
    let big_r = E * E;
    let domain = CanonicalDomain::annulus(big_r).map_err(|e| CliError::Config(e.to_string()))?;
    let Some(hull) = rec.require(
        "boundary.loop.hull",
        topological_hull(&PlaneRegion::from(domain)),
    )?
    else {
        return Ok(());
    };
    let origin = Complex64::new(0.0, 0.0);
    let unit = loop_length_bound(&SampledCurve::circle(origin, 1.0, 4096), &hull, domain);
    let want = PI * PI / 2.0;
    let ok = matches!(&unit, Ok(rep) if rep.holds && (rep.hyperbolic_length - want).abs() < UNIT_CIRCLE_TOL);
    rec.check(
        "boundary.loop.unit_circle",
        ok,
        format!("{:?}", unit.map(|r| r.hyperbolic_length)),
    )?;

    let inner = 1.0 / big_r;
    let mut results = Vec::with_capacity(cfg.loops);
    for i in 0..cfg.loops {
        // Half the loops are concentric, half are small circles that avoid the hole.
        let curve = if i % 2 == 0 {
            let rho = (rng.gen_range(-0.95..0.95) * big_r.ln()).exp();
            SampledCurve::circle(origin, rho, LOOP_SEGMENTS)
        } else {
            let c = sample_canonical(rng, domain);
            let room = (c.norm() - inner).min(big_r - c.norm());
            SampledCurve::circle(c, room * rng.gen_range(0.05..0.9), LOOP_SEGMENTS)
        };
        let r = match loop_length_bound(&curve, &hull, domain) {
            Ok(rep) if rep.holds => Ok(()),
            Ok(rep) => Err(format!("{} < {}", rep.hyperbolic_length, rep.lower_bound)),
            Err(e) => Err(e.to_string()),
        };
        results.push((i, r));
    }
    let (ok, detail) = summary(&failures(&results), results.len());
    rec.check("boundary.loop.random", ok, detail)
}

fn reference_traces(cfg: &BoundaryConfig, dir: &Path, rec: &mut Recorder) -> Outcome {
    let cases = [
        (
            SystemFamily::Tower { r: 2.0, degree: 2 },
            TOWER_REFERENCE_STAGES,
            BoundaryCase::A,
        ),
        (
            SystemFamily::DiskApproach,
            REFERENCE_STAGES,
            BoundaryCase::C,
        ),
        (
            SystemFamily::DiskAlternating,
            REFERENCE_STAGES,
            BoundaryCase::B,
        ),
    ];
    let mut calls = Vec::new();
    for (family, stages, want) in cases {
        let name = family_name(family);
        let system = SyntheticSystem::new(family).map_err(|e| CliError::Config(e.to_string()))?;
        let Some(trace) = rec.require(
            &format!("boundary.trace.{name}"),
            delta_sequence(&system, system.marked_point(), stages),
        )?
        else {
            continue;
        };
        export_boundary_trace(&trace, &dir.join(format!("{name}.csv")))?;
        let gap = trace
            .entries
            .iter()
            .map(|e| ((e.point - e.witness).norm() - e.delta).abs() / e.delta.max(1.0))
            .fold(0.0, f64::max);
        rec.check(
            format!("boundary.witness.{name}"),
            gap <= 1e-9,
            format!("max relative gap {gap:e}"),
        )?;
        let call = convergence_class(&trace, cfg.threshold);
        let ok = match (&call, want) {
            (Ok(c), BoundaryCase::B) => {
                c.case == want
                    && c.low.iter().all(|n| n % 2 == 0)
                    && c.high.iter().all(|n| n % 2 == 1)
            }
            (Ok(c), _) => c.case == want,
            (Err(_), _) => false,
        };
        let detail = match &call {
            Ok(c) => format!("{:?} (want {want:?})", c.case),
            Err(e) => e.to_string(),
        };
        rec.check(format!("boundary.class.{name}"), ok, detail)?;
        calls.push(serde_json::json!({ "system": name, "stages": stages, "call": to_value(&call.map_err(|e| e.to_string())) }));
    }
    write_json(&calls, &dir.join("classification.json"))?;
    Ok(())
}

// ---------------------------------------------------------------- render

fn render(cfg: &RenderConfig, dir: &Path, rec: &mut Recorder) -> Outcome {
    let svg = foliation_svg(cfg.r, cfg.circles, cfg.rays)?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(&cfg.file);
    std::fs::write(&path, &svg).map_err(|e| CliError::io(&path, e))?;
    let red = svg.matches(r#"class="contracting""#).count();
    let blue = svg.matches(r#"class="isometric""#).count();
    rec.check(
        "render.leaf_counts",
        red == cfg.circles && blue == cfg.rays,
        format!("{red} red circles, {blue} blue rays"),
    )
}
