use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use gtcount::bernoulli::{build_valid_tester, make_spec, sample_design, BuildConfig};
use gtcount::condenser::{
    condenser_thresholds, induce_design, search_condenser, validate_condenser_operational, CondenserParams,
    CondenserReport, CondenserTable,
};
use gtcount::expander::{
    design_from_graph, expander_parameters, random_regular_graph, validate_expansion, BipartiteGraph, ExpanderTester,
};
use gtcount::ladder::{plan, ThresholdTester};
use gtcount::numeric::{ceil_log2, format_rational, int};
use gtcount::subsets::binomial;
use gtcount::validate::{BoundaryCheck, CheckMode, EnumConfig, ValidationMode};
use gtcount::Error;

use crate::runs::factory;
use crate::{BuildDesignArgs, BuildPlanArgs, DesignKindArg, GraphArg, TableArg, Usage, ValidateArg, ValidationFailed};

fn enum_config(v: ValidateArg) -> EnumConfig {
    let mode = match v {
        ValidateArg::Exhaustive => ValidationMode::Auto,
        ValidateArg::Sampled => ValidationMode::Sampled,
        ValidateArg::Off => ValidationMode::Off,
    };
    EnumConfig {
        mode,
        ..EnumConfig::from_env()
    }
}

fn mode_name(m: CheckMode) -> &'static str {
    match m {
        CheckMode::Exhaustive => "exhaustive",
        CheckMode::Sampled => "sampled",
        CheckMode::Vacuous => "vacuous",
        CheckMode::Skipped => "skipped",
    }
}

fn describe(c: &BoundaryCheck) -> String {
    let mut s = format!(
        "size {} -> {}: {} of {} sets checked ({}), {} failing",
        c.size,
        u8::from(c.expect),
        c.checked,
        c.population,
        mode_name(c.mode),
        c.failures
    );
    if let Some(w) = &c.witness {
        let items: Vec<String> = w.iter().map(|i| (i + 1).to_string()).collect();
        s.push_str(&format!(", first failing set {{{}}}", items.join(",")));
    }
    s
}

/// With `--validate exhaustive`, every boundary population must fit the budget.
fn require_enumerable(v: ValidateArg, cfg: &EnumConfig, n: usize, sizes: &[usize]) -> Result<()> {
    if v != ValidateArg::Exhaustive {
        return Ok(());
    }
    for &s in sizes {
        let pop = binomial(n, s);
        if pop > cfg.budget {
            return Err(ValidationFailed(format!(
                "C({n}, {s}) = {pop} sets exceed the enumeration budget {} (set GT_ENUM_BUDGET)",
                cfg.budget
            ))
            .into());
        }
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn build_design(args: &BuildDesignArgs) -> Result<ExitCode> {
    match args.kind {
        DesignKindArg::Bernoulli => bernoulli(args),
        DesignKindArg::Expander => expander(args),
        DesignKindArg::Condenser => condenser(args),
    }
}

fn need<T: Clone>(v: &Option<T>, flag: &str, kind: &str) -> Result<T> {
    v.clone().ok_or_else(|| Usage(format!("{kind} designs need {flag}")).into())
}

fn bernoulli(args: &BuildDesignArgs) -> Result<ExitCode> {
    let n = need(&args.n, "--n", "bernoulli")?;
    let ell = need(&args.ell, "--ell", "bernoulli")?;
    let delta = need(&args.delta, "--delta", "bernoulli")?;
    let spec = make_spec(n, &ell, delta)?;
    let design = if args.validate == ValidateArg::Off {
        let spec = match args.t {
            Some(t) => spec.with_t(t),
            None => spec,
        };
        eprintln!("validation skipped; t={}", spec.t);
        sample_design(&spec, args.seed)
    } else {
        let cfg = enum_config(args.validate);
        require_enumerable(args.validate, &cfg, n, &[spec.low_size(), spec.high_size()])?;
        let build = BuildConfig {
            seed: args.seed,
            initial_t: args.t,
            enumeration: cfg,
            ..BuildConfig::default()
        };
        let built = match build_valid_tester(n, &ell, delta, &build) {
            Ok(b) => b,
            Err(e @ Error::Construction { .. }) => return Err(ValidationFailed(e.to_string()).into()),
            Err(e) => return Err(e.into()),
        };
        eprintln!(
            "validation PASS: t={} (formula {}), resamples {}, doublings {}",
            built.tester.design().t(),
            built.formula_t,
            built.resamples,
            built.doublings
        );
        eprintln!("  {}", describe(&built.report.low));
        eprintln!("  {}", describe(&built.report.high));
        built.tester.into_design()
    };
    write_file(&args.out, &design.to_text())?;
    Ok(ExitCode::SUCCESS)
}

fn expander(args: &BuildDesignArgs) -> Result<ExitCode> {
    let n = need(&args.n, "--n", "expander")?;
    let graph = match args.graph {
        GraphArg::Identity => BipartiteGraph::identity(n),
        GraphArg::Random => random_regular_graph(n, args.m.unwrap_or(2 * n), args.degree, args.seed)?,
    };
    let derived = match (&args.ell, args.delta) {
        (Some(ell), Some(delta)) => Some((ell.clone(), delta, expander_parameters(ell, delta, graph.degree()))),
        (None, None) => None,
        _ => return Err(Usage("--ell and --delta go together".into()).into()),
    };
    let target = match (&derived, args.k, &args.a) {
        (_, Some(k), Some(a)) => Some((k as usize, a.clone())),
        (Some((_, _, (_, k, a))), None, None) => Some((*k, a.clone())),
        (None, None, None) => None,
        _ => return Err(Usage("give both --k and --a, or neither".into()).into()),
    };
    let mut design = design_from_graph(&graph);
    match (target, args.validate) {
        (Some((k, a)), v) if v != ValidateArg::Off => {
            let cfg = enum_config(v);
            let sizes: Vec<usize> = (1..=k.min(n)).collect();
            require_enumerable(v, &cfg, n, &sizes)?;
            let outcome = validate_expansion(&graph, k, &a, &cfg);
            let witness: Vec<String> = outcome.witness.iter().map(|i| (i + 1).to_string()).collect();
            eprintln!(
                "expansion over {} sets ({}): min |Γ(S)|/|S| = {} at {{{}}}",
                outcome.sets_checked,
                mode_name(outcome.checked),
                format_rational(&outcome.min_ratio),
                witness.join(",")
            );
            let Some(cert) = outcome.certificate else {
                return Err(ValidationFailed(format!(
                    "graph is not a ({k}, {})-expander",
                    format_rational(&a)
                ))
                .into());
            };
            eprintln!("validation PASS: ({k}, {})-expander", format_rational(&a));
            if let Some((ell, delta, _)) = &derived {
                design = ExpanderTester::new(&graph, &cert, ell, *delta).design().clone();
            }
        }
        _ => eprintln!("validation skipped"),
    }
    write_file(&args.out, &graph.to_text())?;
    if let Some(p) = &args.design_out {
        write_file(p, &design.to_text())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn condenser(args: &BuildDesignArgs) -> Result<ExitCode> {
    let n_hat = match (args.nhat, args.n) {
        (Some(h), _) => h,
        (None, Some(n)) => ceil_log2(&int(n as u64)),
        (None, None) => return Err(Usage("condenser designs need --nhat or --n".into()).into()),
    };
    let n = args.n.unwrap_or(1usize << n_hat);
    if n == 0 || n > 1usize << n_hat {
        return Err(Usage(format!("--n must lie in 1..=2^{n_hat}")).into());
    }
    let (k, k_prime, epsilon) = match (&args.ell, args.delta, args.k, args.kprime) {
        (_, _, Some(k), Some(kp)) => (k, kp, args.eps.clone()),
        (Some(ell), Some(delta), None, None) => condenser_thresholds(ell, delta)?,
        _ => return Err(Usage("give --k and --kprime, or --ell and --delta".into()).into()),
    };
    let params = CondenserParams {
        n_hat,
        t_hat: args.that,
        m_hat: args.mhat.unwrap_or(n_hat),
        k,
        k_prime,
        epsilon,
    };
    let cfg = enum_config(args.validate);
    if args.validate != ValidateArg::Off {
        require_enumerable(args.validate, &cfg, n, &[params.low_size(), params.high_size()])?;
    }
    let (table, report): (CondenserTable, Option<CondenserReport>) = match args.table {
        TableArg::Injective => (CondenserTable::injective(params)?, None),
        TableArg::Random => (CondenserTable::random(params, args.seed)?, None),
        TableArg::Search => {
            let (t, r, attempt) = search_condenser(&params, n, args.seed, args.tables, &cfg)?;
            eprintln!("search: table {attempt} validated");
            (t, Some(r))
        }
    };
    if args.validate == ValidateArg::Off {
        eprintln!("validation skipped");
    } else {
        let report = match report {
            Some(r) => r,
            None => validate_condenser_operational(&table, n, &cfg)?,
        };
        eprintln!("  {}", describe(&report.low));
        eprintln!("  {}", describe(&report.high));
        if !report.passed() {
            return Err(ValidationFailed("condenser verdicts do not separate the boundary sizes".into()).into());
        }
        eprintln!("validation PASS");
    }
    write_file(&args.out, &table.to_text())?;
    if let Some(p) = &args.design_out {
        write_file(p, &induce_design(&table, n)?.to_text())?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn build_plan(args: &BuildPlanArgs) -> Result<ExitCode> {
    let problem = gtcount::EstimationProblem::new(args.n, args.upper_d, args.delta)?;
    let f = factory(args.method, args.seed)?;
    let p = plan(&problem, f.as_ref())?;
    eprintln!("{} levels, {} planned tests", p.levels().len(), p.planned_tests());
    write_file(&args.out, &p.to_text())?;
    Ok(ExitCode::SUCCESS)
}
