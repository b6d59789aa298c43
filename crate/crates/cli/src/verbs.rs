use std::path::Path;
use std::sync::Arc;

use kvcohom::battery;
use kvcohom::complex::Variant;
use kvcohom::deform::{curvature_check, rigidity_report, Jet};
use kvcohom::ext::{algebra_extension, Semidirect};
use kvcohom::fixtures;
use kvcohom::geom::{
    find_radiant, integrate_geodesic, s_cocycle_suite, parallel_cochains, radiant_primitive,
    s_alpha_beta, y_power_law_fit, GeodesicProblem, Termination,
};
use kvcohom::graded::{self, kv_chain_violation, GradedKvAlgebra};
use kvcohom::io::{
    self, AlgebraExtensionFile, AlgebraFile, CochainFile, GradedFile, JetFile, ModuleExtensionFile,
    ModuleFile, PairFile,
};
use kvcohom::nijenhuis::nijenhuis_cohomology;
use kvcohom::rat::r;
use kvcohom::{Cochain, KvAlgebra, KvComplex, KvModule};
use serde_json::{json, Value};

use crate::report::{value, Failure, Inputs, Run};
use crate::Verb;

pub enum Output {
    Report { verdict: bool, results: Value },
    Raw(String),
}

fn report(verdict: bool, results: Value) -> Run<Output> {
    Ok(Output::Report { verdict, results })
}

enum Structure {
    Algebra(KvAlgebra),
    Module(KvModule),
}

fn read_structure(inputs: &mut Inputs, path: &Path) -> Run<Structure> {
    let text = inputs.read(path)?;
    let v: Value = io::from_json(&text)?;
    if v.get("algebra").is_some() {
        Ok(Structure::Module(io::from_json::<ModuleFile>(&text)?.to_module()?))
    } else {
        Ok(Structure::Algebra(io::from_json::<AlgebraFile>(&text)?.to_algebra()?))
    }
}

fn read_module(inputs: &mut Inputs, path: &Path) -> Run<KvModule> {
    let text = inputs.read(path)?;
    Ok(io::read_module_or_regular(&text)?)
}

fn read_algebra(inputs: &mut Inputs, path: &Path) -> Run<Arc<KvAlgebra>> {
    Ok(Arc::new(inputs.read_json::<AlgebraFile>(path)?.to_algebra()?))
}

fn read_cochain(inputs: &mut Inputs, path: &Path) -> Run<Cochain> {
    Ok(inputs.read_json::<CochainFile>(path)?.to_cochain()?)
}

fn read_graded(inputs: &mut Inputs, path: &Path) -> Run<GradedKvAlgebra> {
    Ok(inputs.read_json::<GradedFile>(path)?.to_graded()?)
}

fn require_module(w: &KvModule) -> Run<()> {
    w.algebra().require_kv()?;
    w.require_module()?;
    Ok(())
}

pub fn run(verb: &Verb, inputs: &mut Inputs) -> Run<Output> {
    match verb {
        Verb::Verify { file } => verify(read_structure(inputs, file)?),
        Verb::Jacobi { file } => jacobi(read_structure(inputs, file)?),
        Verb::Cohomology { file, q_max } => {
            let w = read_module(inputs, file)?;
            require_module(&w)?;
            let rep = KvComplex::new(w)?.cohomology(*q_max)?;
            report(true, json!({ "dims_h": rep.dims_h(), "report": value(&rep) }))
        }
        Verb::Nijenhuis { file, q_max } => {
            let w = read_module(inputs, file)?;
            require_module(&w)?;
            let rep = nijenhuis_cohomology(&w, *q_max)?;
            let consistent = rep.degrees.iter().all(|d| d.dim_h == d.dim_z - d.dim_b);
            report(consistent, json!({ "dims_h": rep.dims_h(), "report": value(&rep) }))
        }
        Verb::ExtendAlgebra { module, cochain } => {
            let w = read_module(inputs, module)?;
            require_module(&w)?;
            let omega = read_cochain(inputs, cochain)?;
            let ext = algebra_extension(&w, &omega)?;
            let residual = ext.kv_residual();
            report(
                residual.is_zero(),
                json!({
                    "is_kv": ext.total.is_kv(),
                    "kv_residual": value(&residual),
                    "witness": residual.first_nonzero(),
                    "extension": value(&AlgebraExtensionFile::from_extension(&ext)),
                }),
            )
        }
        Verb::ExtendModule { w, v, cochain } => {
            let (w, v) = (read_module(inputs, w)?, read_module(inputs, v)?);
            require_module(&w)?;
            require_module(&v)?;
            let f = read_cochain(inputs, cochain)?;
            let s = Semidirect::new(&w, &v)?;
            let df = s.complex().coboundary(&f)?;
            if let Some(t) = df.first_nonzero() {
                return report(false, json!({ "cocycle": false, "witness": t }));
            }
            let ext = s.module_extension(&f)?;
            report(
                true,
                json!({
                    "cocycle": true,
                    "exact": ext.is_exact()?,
                    "extension": value(&ModuleExtensionFile::from_extension(&ext)),
                }),
            )
        }
        Verb::ClassifyExt { w, v, f, g } => {
            let (w, v) = (read_module(inputs, w)?, read_module(inputs, v)?);
            require_module(&w)?;
            require_module(&v)?;
            let (f, g) = (read_cochain(inputs, f)?, read_cochain(inputs, g)?);
            let s = Semidirect::new(&w, &v)?;
            for (label, c) in [("f", &f), ("g", &g)] {
                if let Some(t) = s.complex().coboundary(c)?.first_nonzero() {
                    return report(false, json!({ "not_cocycle": label, "witness": t }));
                }
            }
            let shear = s
                .module_extension(&f)?
                .equivalence_shear(&s.module_extension(&g)?)?;
            report(
                true,
                json!({ "equivalent": shear.is_some(), "shear": shear.as_ref().map(value) }),
            )
        }
        Verb::DeformCheck { jet } => {
            let jet = inputs.read_json::<JetFile>(jet)?.to_jet()?;
            jet.base().require_kv()?;
            let residuals = jet.residuals()?;
            let failure = jet.first_failure()?;
            report(
                failure.is_none(),
                json!({
                    "order": jet.order(),
                    "residual_zero": residuals.iter().map(Cochain::is_zero).collect::<Vec<_>>(),
                    "first_failure": failure.map(|(k, t)| json!({ "order": k, "witness": t })),
                }),
            )
        }
        Verb::DeformSolve { jet, orders } => {
            let mut jet = inputs.read_json::<JetFile>(jet)?.to_jet()?;
            jet.base().require_kv()?;
            let mut steps = Vec::new();
            let mut ok = true;
            for _ in 0..*orders {
                let next = jet.solve_next_order()?;
                steps.push(value(&next));
                match next.solution {
                    Some(mu) => jet.push(mu)?,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            report(ok, json!({ "steps": steps, "jet": value(&JetFile::from_jet(&jet)) }))
        }
        Verb::Rigidity { file } => {
            let a = read_algebra(inputs, file)?;
            a.require_kv()?;
            report(true, value(&rigidity_report(&a)?))
        }
        Verb::CurvatureCheck { algebra, s } => {
            let a = read_algebra(inputs, algebra)?;
            a.require_kv()?;
            let s = read_cochain(inputs, s)?;
            if s.degree() != 2 {
                return Err(Failure::Input("S must be a 2-cochain".into()));
            }
            let rep = curvature_check(&a, &s.to_bilinear())?;
            report(rep.identity_holds, value(&rep))
        }
        Verb::GradedCheck { file } => {
            let g = read_graded(inputs, file)?;
            let (lower, upper) = g.jacobi_inclusions()?;
            let kv = g.total().is_kv();
            report(
                kv && lower && upper,
                json!({
                    "even_dim": g.n(),
                    "odd_dim": g.m(),
                    "is_kv": kv,
                    "jacobi_inclusions": [lower, upper],
                    "exact_connectionlike_dim": g.exact_connectionlike_dim()?,
                }),
            )
        }
        Verb::GradedDeform { file, theta } => {
            let g = read_graded(inputs, file)?;
            let c = read_cochain(inputs, theta)?;
            if c.degree() != 2 || c.arg_dim() != g.m() || c.value_dim() != g.m() {
                return Err(Failure::Input("theta must be a 2-cochain on W with values in W".into()));
            }
            let theta = c.to_bilinear();
            let deformed = g.deform(&theta)?;
            let cocycle = g.is_theta_cocycle(&theta)?;
            let chain = kv_chain_violation(&theta)?;
            report(
                deformed.is_kv(),
                json!({
                    "is_kv": deformed.is_kv(),
                    "theta_cocycle": cocycle,
                    "derivation_witness": g.derivation_violation(&theta)?,
                    "kv_chain": chain.is_none(),
                    "kv_chain_witness": chain,
                    "conditions_agree": deformed.is_kv() == (cocycle && chain.is_none()),
                    "deformed": value(&AlgebraFile::from_algebra(&deformed)),
                }),
            )
        }
        Verb::Connectionlike { file, pair } => {
            let g = read_graded(inputs, file)?;
            let pair = inputs.read_json::<PairFile>(pair)?.to_pair()?;
            let rep = g.is_connectionlike(&pair)?;
            report(
                rep.holds(),
                json!({ "report": value(&rep), "exact": g.is_exact(&pair)? }),
            )
        }
        Verb::AffSuite { alpha, beta } => {
            let pairs = match (alpha, beta) {
                (Some(a), Some(b)) => vec![(a.clone(), b.clone())],
                _ => vec![(r(1), r(0)), (r(2), r(3)), (r(-1), r(5))],
            };
            let mut reps = Vec::new();
            for (a, b) in &pairs {
                reps.push(s_cocycle_suite(a, b)?);
            }
            let aff = fixtures::aff();
            report(
                reps.iter().all(|x| x.passed()),
                json!({
                    "is_kv": aff.is_kv(),
                    "jacobi": value(&aff.jacobi()?),
                    "bracket_e1_e2": aff.lie_bracket().fiber(0, 1),
                    "suites": value(&reps),
                }),
            )
        }
        Verb::Geodesic { alpha, beta, x0, y0, vx0, vy0, t0, t1, step, summary } => {
            let mut p = GeodesicProblem::new(*alpha, *beta, [*x0, *y0, *vx0, *vy0], *t0, *t1);
            p.step = *step;
            let tr = integrate_geodesic(&p)?;
            let ok = !matches!(tr.termination, Termination::StepUnderflow { .. });
            if !*summary {
                if !ok {
                    return Err(Failure::Math(format!("{:?}", tr.termination)));
                }
                return Ok(Output::Raw(tr.to_csv()));
            }
            let fit = if tr.termination == Termination::ReachedEnd && *alpha != 0.0 && *alpha != -1.0 {
                y_power_law_fit(&tr, *alpha, *beta).ok()
            } else {
                None
            };
            report(
                ok,
                json!({
                    "problem": value(&p),
                    "termination": value(&tr.termination),
                    "samples": tr.samples.len(),
                    "last": tr.samples.last().map(value),
                    "power_law_fit": fit.map(|f| value(&f)),
                }),
            )
        }
        Verb::Radiant { module, cochain } => {
            let w = read_module(inputs, module)?;
            let g = cochain.as_ref().map(|p| read_cochain(inputs, p)).transpose()?;
            radiant(&w, g)
        }
        Verb::Proptest { seed, count, mutant } => {
            let variant = if *mutant { Variant::FlippedRightTerm } else { Variant::Normative };
            let rep = battery::run(*seed, *count, variant);
            report(rep.passed(), value(&rep))
        }
        Verb::Fixtures { name } => fixture(name.as_deref()),
    }
}

fn verify(s: Structure) -> Run<Output> {
    match s {
        Structure::Algebra(a) => {
            let v = a.kv_violation();
            report(v.is_none(), json!({ "kind": "algebra", "is_kv": v.is_none(), "witness": v }))
        }
        Structure::Module(w) => {
            let av = w.algebra().kv_violation();
            let mv = w.module_violation();
            report(
                av.is_none() && mv.is_none(),
                json!({
                    "kind": "module",
                    "algebra_is_kv": av.is_none(),
                    "algebra_witness": av,
                    "is_module": mv.is_none(),
                    "witness": mv.map(|x| value(&x)),
                }),
            )
        }
    }
}

fn jacobi(s: Structure) -> Run<Output> {
    match s {
        Structure::Algebra(a) => {
            a.require_kv()?;
            let j = a.jacobi()?;
            let c = a.center();
            report(
                c.is_subspace_of(&j)?,
                json!({ "kind": "algebra", "jacobi": value(&j), "center": value(&c) }),
            )
        }
        Structure::Module(w) => report(true, json!({ "kind": "module", "jacobi": value(&w.jacobi()) })),
    }
}

fn radiant(w: &KvModule, g: Option<Cochain>) -> Run<Output> {
    let a = w.algebra();
    let Some(set) = find_radiant(a)? else {
        return report(false, json!({ "radiant": Value::Null }));
    };
    let parallel = parallel_cochains(&w.left_part())?;
    let targets: Vec<Cochain> = match g {
        Some(g) => vec![g],
        None => parallel
            .basis()
            .iter()
            .map(|v| Cochain::from_values(a.dim(), w.dim(), 2, v.clone()))
            .collect::<kvcohom::Result<_>>()?,
    };
    let mut primitives = Vec::new();
    for g in &targets {
        let theta = radiant_primitive(w, &set.particular, g)?;
        primitives.push(json!({ "g": value(g), "theta": value(&theta) }));
    }
    report(
        true,
        json!({ "radiant": value(&set), "parallel_dim": parallel.dim(), "primitives": primitives }),
    )
}

pub const EXTRA_FIXTURES: [&str; 6] =
    ["radiant2-module", "radiant2-parallel", "aff-s10", "aff-s10-jet", "poly-graded", "poly-pair"];

fn fixture(name: Option<&str>) -> Run<Output> {
    let Some(name) = name else {
        let mut names: Vec<&str> = fixtures::NAMES.to_vec();
        names.extend(EXTRA_FIXTURES);
        return Ok(Output::Raw(io::to_json(&names)));
    };
    if let Some(a) = fixtures::by_name(name) {
        return Ok(Output::Raw(io::to_json(&AlgebraFile::from_algebra(&a.named(name)))));
    }
    let text = match name {
        "radiant2-module" => io::to_json(&ModuleFile::from_module(&fixtures::radiant2_module())),
        "radiant2-parallel" => {
            let c = Cochain::from_values(2, 1, 2, fixtures::radiant2_parallel())?;
            io::to_json(&CochainFile::from_cochain(&c))
        }
        "aff-s10" => io::to_json(&CochainFile::from_cochain(&Cochain::from_bilinear(&s_alpha_beta(
            &r(1),
            &r(0),
        )))),
        "aff-s10-jet" => {
            let jet = Jet::new(Arc::new(fixtures::aff().named("aff")), vec![s_alpha_beta(&r(1), &r(0))])?;
            io::to_json(&JetFile::from_jet(&jet))
        }
        "poly-graded" => io::to_json(&GradedFile::from_graded(&graded::fixture().0)),
        "poly-pair" => io::to_json(&PairFile::from_pair(&graded::fixture().1)),
        other => return Err(Failure::Input(format!("unknown fixture {other:?}"))),
    };
    Ok(Output::Raw(text))
}
