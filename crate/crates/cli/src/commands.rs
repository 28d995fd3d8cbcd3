//! Command dispatch. Every command returns an artifact; the exit status is
//! derived from its `Status`, errors map to 2.

use crate::error::{CliError, CliResult};
use crate::format::{parse_point, parse_system_doc, parse_witness_doc, Doc, Input, SystemFile};
use crate::manifest::{Artifact, Certificate, RunManifest, Status};
use crate::rfmx;
use resfin_core::free_group::sphere;
use resfin_core::matrix::{berg_projection, extract_finite_action, OrbitRepresentation, Tolerances};
use resfin_core::paradox::{
    affine_lift, block_masses, decide_paradoxical, equidecompose, fixed_point_model, invariant_measure_lp,
    measure_to_model, verify_certificate, verify_equidecomposition, verify_measure, ActionContext, ContextCaps,
    MeasuredJoin,
};
use resfin_core::rational::{self, render, Rational};
use resfin_core::symbolic::{algebraic_fixed_points, algebraic_model_witness, bernoulli_model, FiniteQuotient};
use resfin_core::system::{CompactPoint, SampleMetric};
use resfin_core::witness::TestFunction;
use resfin_core::zsystems::compress::DEFAULT_ATOM_CAP;
use resfin_core::zsystems::graph::build_eps_graph_on;
use resfin_core::zsystems::{chain_recurrent_set, find_compressible_clopen, model_from_chains_on, recurrence_scan};
use resfin_core::{check_witness, Error, Point, Resolution, SystemDescriptor, Witness};
use serde_json::{json, Value};

pub const COMMANDS: [&str; 15] = [
    "check-witness",
    "chain-recurrence",
    "compressible",
    "recurrence-scan",
    "paradox",
    "invariant-measure",
    "equidecompose",
    "measure-to-model",
    "affine-lift",
    "fixed-point-model",
    "bernoulli-model",
    "algebraic",
    "microstate-extract",
    "berg",
    "selftest",
];

pub const USAGE: &str = "\
usage: resfin <command> [inputs...] [flags]

commands:
  check-witness SYSTEM WITNESS          recheck a witness (TOML or JSON artifact)
  chain-recurrence SYSTEM               epsilon-chain recurrence on the sample or grid
  compressible SYSTEM                   clopen U with T(U) a proper subset, windows 1..=N
  recurrence-scan SYSTEM PARAMS         least (n, m) with d(T^n x, T^-m x) < eps
  paradox SYSTEM [PARAMS [CERT]]        (k, l)-paradoxical decomposition at a context
  invariant-measure SYSTEM [PARAMS [CERT]]
  equidecompose SYSTEM PARAMS [CERT]
  measure-to-model SYSTEM PARAMS        finite model from a product measure
  affine-lift SYSTEM PARAMS WITNESS     lift a witness to measures
  fixed-point-model SYSTEM PARAMS       model of an affine map with a fixed point
  bernoulli-model SYSTEM PARAMS         model from a finite quotient
  algebraic SYSTEM PARAMS               periodic points of an algebraic action
  microstate-extract MATRICES.rfmx      finite action from approximate microstates
  berg SYSTEM PARAMS                    Berg projection on a rotation orbit
  selftest                              run the acceptance suite

flags:
  --epsilon p/q  --window N  --ball N  --horizon N  --seed N  --tol name=value  --out path
environment:
  RESFIN_CAP_ATOMS   bound on context and atom-algebra sizes

exit status: 0 verified/found, 1 refuted/none at this context, 2 error
";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Options {
    pub epsilon: Option<Rational>,
    pub window: Option<usize>,
    pub ball: Option<usize>,
    pub horizon: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Vec<(String, String)>,
    pub cap_atoms: Option<usize>,
}

impl Options {
    pub fn resolution(&self) -> Resolution {
        let mut r = Resolution::default();
        if let Some(b) = self.ball {
            r.ball_cap = b;
        }
        r
    }

    pub fn tolerances(&self) -> CliResult<Tolerances> {
        let mut t = Tolerances::default();
        for (name, value) in &self.tol {
            let v: f64 = value.parse().map_err(|_| CliError::Usage(format!("--tol {name}={value}: not a number")))?;
            let slot = match name.as_str() {
                "output" => &mut t.output,
                "input" => &mut t.input,
                "gap" => &mut t.gap,
                "trace" => &mut t.trace,
                "singular" => &mut t.singular,
                "slack" => &mut t.slack,
                _ => return Err(CliError::Usage(format!("unknown tolerance {name:?}"))),
            };
            *slot = v;
        }
        Ok(t)
    }

    pub fn caps(&self) -> ContextCaps {
        let mut c = ContextCaps::default();
        if let Some(a) = self.cap_atoms {
            c.max_atoms = a;
        }
        c
    }

    fn manifest(&self, command: &str, inputs: &[Input]) -> RunManifest {
        let mut m = RunManifest::new(command, inputs);
        m.seed = self.seed;
        m.tolerances = self.tol.iter().cloned().collect();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.parameters.insert(k.into(), v);
            }
        };
        put("epsilon", self.epsilon.as_ref().map(render));
        put("window", self.window.map(|x| x.to_string()));
        put("ball", self.ball.map(|x| x.to_string()));
        put("horizon", self.horizon.map(|x| x.to_string()));
        put("cap_atoms", self.cap_atoms.map(|x| x.to_string()));
        m
    }
}

type Outcome = (Status, Value, Option<Certificate>);

pub fn run(command: &str, inputs: &[Input], opts: &Options) -> CliResult<Artifact> {
    let (status, report, certificate) = match command {
        "check-witness" => check_witness_cmd(inputs, opts)?,
        "chain-recurrence" => chain_recurrence(inputs, opts)?,
        "compressible" => compressible(inputs, opts)?,
        "recurrence-scan" => recurrence(inputs, opts)?,
        "paradox" => paradox(inputs, opts)?,
        "invariant-measure" => invariant_measure(inputs, opts)?,
        "equidecompose" => equidecompose_cmd(inputs, opts)?,
        "measure-to-model" => measure_model(inputs, opts)?,
        "affine-lift" => lift(inputs, opts)?,
        "fixed-point-model" => fixed_point(inputs, opts)?,
        "bernoulli-model" => bernoulli(inputs, opts)?,
        "algebraic" => algebraic(inputs, opts)?,
        "microstate-extract" => microstate(inputs, opts)?,
        "berg" => berg(inputs, opts)?,
        "selftest" => selftest(opts)?,
        other => return Err(CliError::Usage(format!("unknown command {other:?}\n\n{USAGE}"))),
    };
    Ok(Artifact { manifest: opts.manifest(command, inputs), status, report, certificate })
}

fn need(inputs: &[Input], n: usize, usage: &str) -> CliResult<()> {
    if inputs.len() < n {
        return Err(CliError::Usage(format!("usage: resfin {usage}")));
    }
    Ok(())
}

fn system(inputs: &[Input]) -> CliResult<SystemFile> {
    crate::format::parse_system_file(&inputs[0])
}

fn params(inputs: &[Input], i: usize) -> CliResult<Option<Doc<'_>>> {
    inputs.get(i).map(Doc::parse).transpose()
}

fn is_json(input: &Input) -> bool {
    input.bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{')
}

fn certificate(input: &Input) -> CliResult<Certificate> {
    Artifact::from_json(&input.name, &input.bytes)?
        .certificate
        .ok_or_else(|| CliError::Usage(format!("{}: artifact carries no certificate", input.name)))
}

/// Flag first, then the parameter file.
fn epsilon(doc: Option<&Doc>, opts: &Options) -> CliResult<Rational> {
    if let Some(e) = &opts.epsilon {
        return Ok(e.clone());
    }
    match doc.filter(|d| d.opt("epsilon").is_some()) {
        Some(d) => d.rational("epsilon"),
        None => Err(CliError::Usage("--epsilon p/q is required".into())),
    }
}

fn witness_report(system: &SystemDescriptor, w: &Witness) -> Value {
    json!({
        "system": system.kind(),
        "size": w.size(),
        "epsilon": render(&w.epsilon),
        "density_defect": render(&w.density_defect),
        "equivariance_defect": render(&w.equivariance_defect),
        "passes": w.passes(),
    })
}

fn passes_status(w: &Witness) -> Status {
    if w.passes() {
        Status::Found
    } else {
        Status::Refuted
    }
}

fn check_witness_cmd(inputs: &[Input], opts: &Options) -> CliResult<Outcome> {
    need(inputs, 2, "check-witness SYSTEM WITNESS")?;
    let sys = system(inputs)?;
    let system = sys.descriptor()?;
    let res = opts.resolution();
    let (action, zeta, scope, eps, recorded) = if is_json(&inputs[1]) {
        let cert = certificate(&inputs[1])?;
        let w = cert.witness().ok_or_else(|| CliError::Usage("certificate does not contain a witness".into()))?;
        let eps = opts.epsilon.clone().unwrap_or_else(|| w.epsilon.clone());
        (w.action.clone().revalidate()?, w.zeta.clone(), w.scope.clone(), eps, Some(w.clone()))
    } else {
        let doc = Doc::parse(&inputs[1])?;
        let wi = parse_witness_doc(&doc, system)?;
        let eps = match (&opts.epsilon, wi.epsilon.clone()) {
            (Some(e), _) => e.clone(),
            (None, Some(e)) => e,
            (None, None) => return Err(CliError::Usage("--epsilon p/q is required".into())),
        };
        (wi.action, wi.zeta, wi.scope, eps, None)
    };
    let fresh = check_witness(system, &action, &zeta, &scope, &eps, &res)?;
    let agrees = recorded.filter(|r| r.epsilon == fresh.epsilon).map(|r| {
        r.density_defect == fresh.density_defect && r.equivariance_defect == fresh.equivariance_defect
    });
    let mut report = witness_report(system, &fresh);
    report["matches_recorded"] = json!(agrees);
    let status = if fresh.passes() && agrees != Some(false) { Status::Verified } else { Status::Refuted };
    Ok((status, report, Some(Certificate::Witness(fresh))))
}

fn sample_points(system: &SystemDescriptor, eps: &Rational, res: &Resolution) -> CliResult<Vec<Point>> {
    if system.rank() != 1 {
        return Err(CliError::Usage(format!("{} acts by more than one map", system.kind())));
    }
    Ok(system.grid(eps, res)?)
}

fn chain_recurrence(inputs: &[Input], opts: &Options) -> CliResult<Outcome> {
    need(inputs, 1, "chain-recurrence SYSTEM --epsilon p/q")?;
    let sys = system(inputs)?;
    let system = sys.descriptor()?;
    let eps = epsilon(None, opts)?;
    let res = opts.resolution();
    let points = sample_points(system, &eps, &res)?;
    let graph = build_eps_graph_on(system, &points, &eps)?;
    let recurrent = chain_recurrent_set(&graph);
    let transient: Vec<&Point> =
        (0..points.len()).filter(|i| recurrent.binary_search(i).is_err()).map(|i| &points[i]).collect();
    let report = json!({
        "system": system.kind(),
        "epsilon": render(&eps),
        "nodes": points.len(),
        "recurrent": recurrent.len(),
        "non_recurrent": transient,
        "chain_recurrent": transient.is_empty(),
    });
    if !transient.is_empty() {
        return Ok((Status::Refuted, report, None));
    }
    let w = model_from_chains_on(system, &points, &eps, &res)?;
    Ok((Status::Found, report, Some(Certificate::Witness(w))))
}

fn compressible(inputs: &[Input], opts: &Options) -> CliResult<Outcome> {
    need(inputs, 1, "compressible SYSTEM [--window N]")?;
    let sys = system(inputs)?;
    let system = sys.descriptor()?;
    let cap = opts.cap_atoms.unwrap_or(DEFAULT_ATOM_CAP);
    let max_window = opts.window.unwrap_or(3);
    for w in 1..=max_window {
        if let Some(u) = find_compressible_clopen(system, w, cap)? {
            let report = json!({ "system": system.kind(), "window": w, "atoms": u.atoms });
            return Ok((Status::Found, report, Some(Certificate::Clopen(u))));
        }
    }
    let report = json!({ "system": system.kind(), "windows": (1..=max_window).collect::<Vec<_>>(), "atom_cap": cap });
    Ok((Status::NoneAtContext, report, None))
}

fn recurrence(inputs: &[Input], opts: &Options) -> CliResult<Outcome> {
    need(inputs, 2, "recurrence-scan SYSTEM PARAMS --epsilon p/q [--horizon N]")?;
    let sys = system(inputs)?;
    let system = sys.descriptor()?;
    let doc = Doc::parse(&inputs[1])?;
    let eps = epsilon(Some(&doc), opts)?;
    let x = parse_point(&doc, "point", system, doc.value("point")?)?;
    let lower = doc.usize_or("lower", 1)?;
    let horizon = opts.horizon.unwrap_or(doc.usize_or("horizon", 1000)?);
    let found = recurrence_scan(system, &x, &eps, lower, horizon)?;
    let report = json!({ "epsilon": render(&eps), "lower": lower, "horizon": horizon, "recurrence": found });
    Ok((if found.is_some() { Status::Found } else { Status::NoneAtContext }, report, None))
}

fn context(sys: &SystemFile, doc: Option<&Doc>, opts: &Options) -> CliResult<(ActionContext, Value)> {
    let get = |f: &str, default: usize| doc.map_or(Ok(default), |d| d.usize_or(f, default));
    let radius = get("radius", 1)?;
    let caps = opts.caps();
    let ctx = match sys {
        SystemFile::Action(a) => ActionContext::finite(a, radius, &caps)?,
        SystemFile::Descriptor(SystemDescriptor::FrBoundary { rank }) => {
            ActionContext::boundary(*rank, opts.window.map_or_else(|| get("length", 1), Ok)?, radius, &caps)?
        }
        SystemFile::Descriptor(SystemDescriptor::CompactifiedZ(c)) => {
            ActionContext::compactified(c, opts.window.map_or_else(|| get("window", 2), Ok)?, radius, &caps)?
        }
        other => return Err(CliError::Usage(format!("no action contexts for {} systems", other.kind()))),
    };
    let bound = json!({
        "description": ctx.description,
        "hash": ctx.hash,
        "radius": radius,
        "domain_atoms": ctx.domain.len(),
        "eval_atoms": ctx.eval.len(),
        "translators": ctx.translators.len(),
    });
    Ok((ctx, bound))
}

fn target(doc: Option<&Doc>, ctx: &ActionContext) -> CliResult<Vec<usize>> {
    match doc.filter(|d| d.opt("target").is_some()) {
        Some(d) => d.usizes("target"),
        None => Ok((0..ctx.domain.len()).collect()),
    }
}

fn paradox(inputs: &[Input], opts: &Options) -> CliResult<Outcome> {
    need(inputs, 1, "paradox SYSTEM [PARAMS [CERT]]")?;
    let sys = system(inputs)?;
    let doc = params(inputs, 1)?;
    let (ctx, bound) = context(&sys, doc.as_ref(), opts)?;
    if let Some(input) = inputs.get(2) {
        let Certificate::Paradox(cert) = certificate(input)? else {
            return Err(CliError::Usage("expected a paradox certificate".into()));
        };
        let ok = verify_certificate(&ctx, &cert)?;
        let report = json!({ "context": bound, "verified": ok });
        return Ok((if ok { Status::Verified } else { Status::Refuted }, report, Some(Certificate::Paradox(cert))));
    }
    let a = target(doc.as_ref(), &ctx)?;
    let k = doc.as_ref().map_or(Ok(2), |d| d.usize_or("k", 2))? as u32;
    let l = doc.as_ref().map_or(Ok(1), |d| d.usize_or("l", 1))? as u32;
    let found = decide_paradoxical(&ctx, &a, k, l, &opts.caps())?;
    let report = json!({ "context": bound, "target": a, "k": k, "l": l, "paradoxical": found.is_some() });
    Ok(match found {
        Some(c) => (Status::Found, report, Some(Certificate::Paradox(c))),
        None => (Status::NoneAtContext, report, None),
    })
}

fn invariant_measure(inputs: &[Input], opts: &Options) -> CliResult<Outcome> {
    need(inputs, 1, "invariant-measure SYSTEM [PARAMS [CERT]]")?;
    let sys = system(inputs)?;
    let doc = params(inputs, 1)?;
    let (ctx, bound) = context(&sys, doc.as_ref(), opts)?;
    if let Some(input) = inputs.get(2) {
        let Certificate::InvariantMeasure(cert) = certificate(input)? else {
            return Err(CliError::Usage("expected an invariant-measure certificate".into()));
        };
        let ok = verify_measure(&ctx, &cert)?;
        let report = json!({ "context": bound, "verified": ok });
        return Ok((if ok { Status::Verified } else { Status::Refuted }, report, Some(Certificate::InvariantMeasure(cert))));
    }
    let a = target(doc.as_ref(), &ctx)?;
    let found = invariant_measure_lp(&ctx, &a)?;
    let weights: Option<Vec<String>> = found.as_ref().map(|c| c.weights.iter().map(render).collect());
    let report = json!({ "context": bound, "target": a, "weights": weights });
    Ok(match found {
        Some(c) => (Status::Found, report, Some(Certificate::InvariantMeasure(c))),
        None => (Status::NoneAtContext, report, None),
    })
}

fn labeled(doc: &Doc, field: &str) -> CliResult<Vec<(usize, u32)>> {
    doc.usize_rows(field)?
        .into_iter()
        .enumerate()
        .map(|(i, row)| match row.as_slice() {
            [a, l] => Ok((*a, *l as u32)),
            _ => Err(doc.err(field, format!("entry {i}: expected [atom, label]"))),
        })
        .collect()
}

fn equidecompose_cmd(inputs: &[Input], opts: &Options) -> CliResult<Outcome> {
    need(inputs, 2, "equidecompose SYSTEM PARAMS [CERT]")?;
    let sys = system(inputs)?;
    let doc = Doc::parse(&inputs[1])?;
    let (ctx, bound) = context(&sys, Some(&doc), opts)?;
    if let Some(input) = inputs.get(2) {
        let Certificate::Equidecomposition(cert) = certificate(input)? else {
            return Err(CliError::Usage("expected an equidecomposition certificate".into()));
        };
        let ok = verify_equidecomposition(&ctx, &cert)?;
        let report = json!({ "context": bound, "verified": ok });
        return Ok((if ok { Status::Verified } else { Status::Refuted }, report, Some(Certificate::Equidecomposition(cert))));
    }
    let found = equidecompose(&ctx, &labeled(&doc, "source")?, &labeled(&doc, "target")?, &opts.caps())?;
    let report = json!({ "context": bound, "pieces": found.as_ref().map(|e| e.pieces.len()) });
    Ok(match found {
        Some(e) => (Status::Found, report, Some(Certificate::Equidecomposition(e))),
        None => (Status::NoneAtContext, report, None),
    })
}

fn measure_model(inputs: &[Input], opts: &Options) -> CliResult<Outcome> {
    need(inputs, 2, "measure-to-model SYSTEM PARAMS --epsilon p/q")?;
    let sys = system(inputs)?;
    let system = sys.descriptor()?;
    let SystemDescriptor::Shift(space) = system else {
        return Err(CliError::Usage("measure-to-model needs a full shift".into()));
    };
    let doc = Doc::parse(&inputs[1])?;
    let eps = epsilon(Some(&doc), opts)?;
    let radius = if doc.opt("radius").is_some() { doc.rational("radius")? } else { rational::q(1, 1000) };
    let max_den = doc.usize_or("max_denominator", 1000)? as u64;
    let join = MeasuredJoin::bernoulli(space, &doc.rationals("weights")?).map_err(doc.core("weights"))?;
    let model = measure_to_model(system, &join, &eps, &radius, max_den, &opts.resolution())?;
    let mut report = witness_report(system, &model.witness);
    report["multiplier"] = json!(model.multiplier);
    report["denominator"] = json!(model.denominator);
    report["perturbation"] = json!(render(&model.perturbation));
    report["block_masses"] = json!(block_masses(&model).iter().map(render).collect::<Vec<_>>());
    Ok((passes_status(&model.witness), report, Some(Certificate::MeasureModel(model))))
}

/// Test functions used when a command needs `omega` and none is given.
pub fn default_omega(system: &SystemDescriptor) -> Vec<TestFunction> {
    match system {
        SystemDescriptor::Shift(s) => TestFunction::shift_cylinders(s.alphabet(), s.rank(), 1),
        SystemDescriptor::FrBoundary { rank } => sphere(*rank, 1).into_iter().map(TestFunction::BoundaryCylinder).collect(),
        SystemDescriptor::CompactifiedZ(_) => {
            (-2..=2).map(|n| TestFunction::CompactIndicator(CompactPoint::int(n))).collect()
        }
        SystemDescriptor::Polytope(p) => (0..p.dim()).map(TestFunction::Coordinate).collect(),
        SystemDescriptor::Algebraic { .. } => vec![TestFunction::TorusCoordinate(0)],
        SystemDescriptor::FiniteSample(s) => (0..s.len()).map(TestFunction::SampleDistance).collect(),
    }
}

fn lift(inputs: &[Input], opts: &Options) -> CliResult<Outcome> {
    need(inputs, 3, "affine-lift SYSTEM PARAMS WITNESS")?;
    let sys = system(inputs)?;
    let system = sys.descriptor()?;
    let doc = Doc::parse(&inputs[1])?;
    let base = if is_json(&inputs[2]) {
        let cert = certificate(&inputs[2])?;
        let w = cert.witness().ok_or_else(|| CliError::Usage("certificate does not contain a witness".into()))?;
        check_witness(system, &w.action.clone().revalidate()?, &w.zeta, &w.scope, &w.epsilon, &opts.resolution())?
    } else {
        let wdoc = Doc::parse(&inputs[2])?;
        let wi = parse_witness_doc(&wdoc, system)?;
        let eps = wi.epsilon.clone().map_or_else(|| epsilon(Some(&doc), opts), Ok)?;
        check_witness(system, &wi.action, &wi.zeta, &wi.scope, &eps, &opts.resolution())?
    };
    let m = doc.usize_or("m", 2)?;
    let cap = doc.usize_or("size_cap", 1 << 16)?;
    let lifted = affine_lift(system, &base, m, &default_omega(system), cap)?;
    let report = json!({
        "system": system.kind(),
        "m": m,
        "size": lifted.action.size(),
        "base_defect": render(&lifted.base_defect),
        "lift_defect": render(&lifted.lift_defect),
    });
    let status = if lifted.lift_defect <= lifted.base_defect { Status::Found } else { Status::Refuted };
    Ok((status, report, Some(Certificate::LiftedWitness(lifted))))
}

fn fixed_point(inputs: &[Input], opts: &Options) -> CliResult<Outcome> {
    need(inputs, 2, "fixed-point-model SYSTEM PARAMS --epsilon p/q")?;
    let sys = system(inputs)?;
    let system = sys.descriptor()?;
    let SystemDescriptor::Polytope(poly) = system else {
        return Err(CliError::Usage("fixed-point-model needs a polytope".into()));
    };
    let doc = Doc::parse(&inputs[1])?;
    let eps = epsilon(Some(&doc), opts)?;
    let sample = match doc.opt("grid") {
        Some(_) => poly.grid(doc.usize("grid")?),
        None => doc.rational_rows("sample")?,
    };
    let w = doc.rationals("fixed_point")?;
    let m = doc.usize_or("m", 4)?;
    let model = fixed_point_model(poly, &sample, &w, m, &default_omega(system), &eps, &opts.resolution())?;
    let mut report = witness_report(system, &model.witness);
    report["m"] = json!(m);
    report["omega_defect"] = json!(render(&model.omega_defect));
    report["bound"] = json!(render(&model.bound));
    Ok((passes_status(&model.witness), report, Some(Certificate::FixedPointModel(model))))
}

fn bernoulli(inputs: &[Input], opts: &Options) -> CliResult<Outcome> {
    need(inputs, 2, "bernoulli-model SYSTEM PARAMS --epsilon p/q")?;
    let sys = system(inputs)?;
    let system = sys.descriptor()?;
    let SystemDescriptor::Shift(space) = system else {
        return Err(CliError::Usage("bernoulli-model needs a full shift".into()));
    };
    if !space.is_full() {
        return Err(CliError::Usage("bernoulli-model needs a full shift".into()));
    }
    let doc = Doc::parse(&inputs[1])?;
    let eps = epsilon(Some(&doc), opts)?;
    let quotient = match doc.opt("cyclic") {
        Some(_) => FiniteQuotient::cyclic(doc.usize("cyclic")?),
        None => FiniteQuotient::new(doc.usize_rows("perms")?, doc.usize_or("identity", 0)?).map_err(doc.core("perms"))?,
    };
    if quotient.rank() != space.rank() {
        return Err(doc.err("perms", "quotient rank differs from the shift rank"));
    }
    let cap = doc.usize_or("size_cap", 1 << 20)?;
    let w = bernoulli_model(space.alphabet(), &quotient, &eps, cap, &opts.resolution())?;
    let mut report = witness_report(system, &w);
    report["quotient_order"] = json!(quotient.order());
    Ok((passes_status(&w), report, Some(Certificate::Witness(w))))
}

fn algebraic(inputs: &[Input], opts: &Options) -> CliResult<Outcome> {
    need(inputs, 2, "algebraic SYSTEM PARAMS")?;
    let sys = system(inputs)?;
    let system = sys.descriptor()?;
    let SystemDescriptor::Algebraic { f, grid_period } = system else {
        return Err(CliError::Usage("algebraic needs an algebraic system".into()));
    };
    let doc = Doc::parse(&inputs[1])?;
    let n = doc.usize("period")?;
    let (order, factors) = match algebraic_fixed_points(f, n) {
        Ok(x) => x,
        Err(Error::Infinite) => {
            return Ok((Status::NoneAtContext, json!({ "period": n, "fixed_points": "infinite" }), None));
        }
        Err(e) => return Err(e.into()),
    };
    let mut report = json!({
        "period": n,
        "fixed_points": order.to_string(),
        "invariant_factors": factors.iter().map(ToString::to_string).collect::<Vec<_>>(),
    });
    if !doc.bool_or("model", false)? {
        return Ok((Status::Found, report, None));
    }
    let eps = epsilon(Some(&doc), opts)?;
    let w = algebraic_model_witness(f, n, &eps, *grid_period, &opts.resolution())?;
    report["witness"] = witness_report(system, &w);
    Ok((passes_status(&w), report, Some(Certificate::Witness(w))))
}

fn microstate(inputs: &[Input], opts: &Options) -> CliResult<Outcome> {
    need(inputs, 1, "microstate-extract MATRICES.rfmx")?;
    let tuple = rfmx::decode(&inputs[0].name, &inputs[0].bytes)?;
    let ex = extract_finite_action(&tuple, &opts.tolerances()?)?;
    let report = json!({
        "dimension": tuple.dimension,
        "delta": ex.delta,
        "threshold": ex.threshold,
        "labels": ex.labels,
        "permutations": ex.permutations,
    });
    Ok((Status::Found, report, Some(Certificate::Action(ex.action))))
}

/// Orbit segment `T^j x`, `j in start .. start + len`, of a circle sample.
pub fn circle_orbit(
    system: &SystemDescriptor,
    x: usize,
    start: i64,
    len: usize,
    modes: &[i64],
) -> CliResult<OrbitRepresentation> {
    let SystemDescriptor::FiniteSample(s) = system else {
        return Err(CliError::Usage("berg needs a circle sample".into()));
    };
    let SampleMetric::Circle(coords) = s.metric() else {
        return Err(CliError::Usage("berg needs a circle sample".into()));
    };
    let mut p = system.iterate(&Point::Sample(x), start)?;
    let mut turns = Vec::with_capacity(len);
    for _ in 0..len {
        let Point::Sample(i) = p else { unreachable!("sample points stay samples") };
        turns.push(rational::to_f64(&coords[i]));
        p = system.act(resfin_core::free_group::Letter::new(0, false), &p)?;
    }
    let values = modes
        .iter()
        .map(|&m| {
            turns
                .iter()
                .map(|t| num_complex::Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 * t))
                .collect()
        })
        .collect();
    Ok(OrbitRepresentation { start, values })
}

/// `(r, s)` from the least recurrence with `n, m >= 2n + 1` at `eps`.
pub fn berg_placement(
    system: &SystemDescriptor,
    x: usize,
    n: usize,
    eps: &Rational,
    horizon: usize,
) -> CliResult<Option<(i64, i64)>> {
    Ok(recurrence_scan(system, &Point::Sample(x), eps, 2 * n + 1, horizon)?.map(|r| (r.n as i64, -(r.m as i64))))
}

fn berg(inputs: &[Input], opts: &Options) -> CliResult<Outcome> {
    need(inputs, 2, "berg SYSTEM PARAMS")?;
    let sys = system(inputs)?;
    let system = sys.descriptor()?;
    let doc = Doc::parse(&inputs[1])?;
    let n = doc.usize("n")?;
    let x = doc.usize_or("point", 0)?;
    let modes: Vec<i64> = match doc.opt("modes") {
        Some(_) => doc.usizes("modes")?.into_iter().map(|m| m as i64).collect(),
        None => vec![1],
    };
    let (r, s) = match (doc.opt("r"), doc.opt("s")) {
        (Some(_), Some(_)) => (doc.i64("r")?, doc.i64("s")?),
        _ => {
            let eps = match epsilon(Some(&doc), opts) {
                Ok(e) => e,
                Err(_) => rational::q(1, 7 * n as i64),
            };
            let horizon = opts.horizon.unwrap_or(doc.usize_or("horizon", 2000)?);
            match berg_placement(system, x, n, &eps, horizon)? {
                Some(rs) => rs,
                None => {
                    let report = json!({ "n": n, "epsilon": render(&eps), "horizon": horizon, "placement": null });
                    return Ok((Status::NoneAtContext, report, None));
                }
            }
        }
    };
    let gap = r - s;
    let orbit = circle_orbit(system, x, s - gap, 4 * gap as usize, &modes)?;
    let rep = berg_projection(&orbit, n, r, s)?;
    let report = json!({
        "n": n,
        "r": r,
        "s": s,
        "dimension": orbit.len(),
        "shift_minus_v": rep.shift_minus_v,
        "p_v_commutator": rep.p_v_commutator,
        "p_shift_commutator": rep.p_shift_commutator,
        "p_f_commutators": rep.p_f_commutators,
        "bounds_hold": rep.bounds_hold(),
    });
    Ok((if rep.bounds_hold() { Status::Verified } else { Status::Refuted }, report, None))
}

fn selftest(opts: &Options) -> CliResult<Outcome> {
    let results = crate::acceptance::run_all(opts.seed.unwrap_or(crate::acceptance::DEFAULT_SEED));
    let all = results.iter().all(|r| r.passed);
    let report = json!({ "criteria": results });
    Ok((if all { Status::Verified } else { Status::Refuted }, report, None))
}

/// Exit status for a finished run.
pub fn exit_code(result: &CliResult<Artifact>) -> i32 {
    match result {
        Ok(a) => a.status.exit_code(),
        Err(_) => 2,
    }
}

#[doc(hidden)]
pub fn parse_system_text(name: &str, text: &str) -> CliResult<SystemFile> {
    parse_system_doc(&Doc::parse(&Input::new(name, text))?)
}
