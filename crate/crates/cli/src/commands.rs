use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use removal_lab::constructions::{
    family_curve, family_exponent, lift_plus_two, lift_structure, lift_system, product_blowup,
    tensor_power_matched, tensor_power_system,
};
use removal_lab::exponents::{build_prune_schedule, closed_form, solve_exponent};
use removal_lab::fpn::{is_prime, MAX_PRIME};
use removal_lab::oracle::{max_matched_exact, min_deletion_exact, theorem1_audit, OracleStatus};
use removal_lab::procedures::{
    conditional_membership_experiment, greedy_disjoint, membership_experiment,
    choose_dimension, prune_high_degree, subspace_experiment, subspace_trial_counts,
};
use removal_lab::triangles::{count_naive, count_transform, degree_profile, verify_matching};
use removal_lab::{GroupParams, MatchedTriples, Point, PointSet, Rational, Role, Triangle, TripleSystem};

use crate::args::*;
use crate::instance::{format_matched, format_system, read_matched, read_system};
use crate::record::{big, rational, rational_str, real, Outcome, Table};

pub fn run(cli: &Cli) -> Result<Outcome> {
    let ctx = Ctx {
        seed: cli.common.seed,
        threads: cli.common.threads as usize,
        out: &cli.common.out,
        stem: cli.stem(),
    };
    let mut o = Outcome::default();
    o.param("threads", ctx.threads as u64);
    match &cli.command {
        Command::Exponents(a) => exponents(a, &mut o)?,
        Command::Count(a) => count(a, &mut o)?,
        Command::Degrees(a) => degrees(a, &mut o)?,
        Command::Construct(a) => construct(a, &ctx, &mut o)?,
        Command::Lift(a) => lift(a, &ctx, &mut o)?,
        Command::Tensor(a) => tensor(a, &ctx, &mut o)?,
        Command::Blowup(a) => blowup(a, &ctx, &mut o)?,
        Command::Greedy(a) => greedy(a, &mut o)?,
        Command::Prune(a) => prune(a, &mut o)?,
        Command::SubspaceSim(a) => subspace_sim(a, &ctx, &mut o)?,
        Command::OracleMindel(a) => oracle_mindel(a, &mut o)?,
        Command::OracleMaxmatch(a) => oracle_maxmatch(a, &ctx, &mut o)?,
        Command::Audit(a) => audit(a, &mut o)?,
        Command::Frontier(a) => frontier(a, &mut o)?,
    }
    Ok(o)
}

struct Ctx<'a> {
    seed: u64,
    threads: usize,
    out: &'a Path,
    stem: String,
}

impl Ctx<'_> {
    /// Writes a derived instance next to the record and returns its file name.
    fn emit(&self, ext: &str, text: &str) -> Result<String> {
        std::fs::create_dir_all(self.out).with_context(|| format!("creating {}", self.out.display()))?;
        let file = format!("{}.{ext}", self.stem);
        let path = self.out.join(&file);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(file)
    }
}

fn path_value(p: &Path) -> Value {
    Value::String(p.display().to_string())
}

fn group_outputs(o: &mut Outcome, g: &GroupParams) {
    o.output("p", g.p());
    o.output("n", g.n());
    o.output("order", g.order());
}

fn set_sizes(o: &mut Outcome, sys: &TripleSystem) {
    o.output("sizes", json!([sys.x().len(), sys.y().len(), sys.z().len()]));
}

fn delta_of(sys: &TripleSystem, count: u64) -> Rational {
    let n = sys.params().order() as u128;
    Rational::new(count as u128, n * n)
}

fn exponents(a: &ExponentsArgs, o: &mut Outcome) -> Result<()> {
    o.param("tol", real(a.tol));
    let Some(p) = a.p else {
        o.param("all", true);
        let mut table = Table::new(&["p", "c_p", "C_p", "x_star", "h_star", "a_p_log2"]);
        for p in (2..=MAX_PRIME).filter(|&p| is_prime(p)) {
            let e = solve_exponent(p, a.tol)?;
            let s = build_prune_schedule(p)?;
            table.push(vec![
                p.to_string(),
                e.c_p.to_string(),
                e.big_c_p.to_string(),
                e.x_star.to_string(),
                e.h_star.to_string(),
                s.a_p_log2.to_string(),
            ]);
        }
        o.output("primes", table.rows.len());
        o.summary = format!("{} primes tabulated", table.rows.len());
        o.table = Some(table);
        return Ok(());
    };
    o.param("p", p);
    let e = solve_exponent(p, a.tol)?;
    o.output("c_p", real(e.c_p));
    o.output("C_p", real(e.big_c_p));
    o.output("x_star", real(e.x_star));
    o.output("h_star", real(e.h_star));
    if let (Some(av), Some(bv)) = (e.a, e.b) {
        o.output("a", real(av));
        o.output("b", real(bv));
    }
    if p == 2 || p == 3 {
        let cf = closed_form(p)?;
        o.output("closed_form_c_p", real(cf.c_p));
        o.output("closed_form_gap", real((cf.c_p - e.c_p).abs()));
    }
    let s = build_prune_schedule(p)?;
    let check = s.check();
    o.output("a_p_log2", s.a_p_log2);
    o.output("schedule_admissible", check.admissible());
    o.output("schedule_sum_bound", real(check.sum_bound));
    o.summary = format!("p = {p}: c_p = {:.10}, C_p = {:.6}", e.c_p, e.big_c_p);
    Ok(())
}

fn count(a: &CountArgs, o: &mut Outcome) -> Result<()> {
    o.param("instance", path_value(&a.instance));
    o.param("method", format!("{:?}", a.method).to_lowercase());
    let sys = read_system(&a.instance)?;
    group_outputs(o, sys.params());
    set_sizes(o, &sys);
    let naive = matches!(a.method, CountMethod::Naive | CountMethod::Both).then(|| count_naive(&sys));
    let transform = match a.method {
        CountMethod::Transform | CountMethod::Both => Some(count_transform(&sys)?),
        CountMethod::Naive => None,
    };
    if let (Some(x), Some(y)) = (naive, transform) {
        if x != y {
            bail!(removal_lab::Error::Invariant(format!(
                "naive count {x} disagrees with transform count {y}"
            )));
        }
    }
    let total = naive.or(transform).expect("at least one method ran");
    if let Some(x) = naive {
        o.output("naive", x);
    }
    if let Some(y) = transform {
        o.output("transform", y);
    }
    o.output("triangles", total);
    o.output("delta", rational(&delta_of(&sys, total)));
    o.summary = format!("{total} triangles");
    Ok(())
}

fn degrees(a: &InstanceArgs, o: &mut Outcome) -> Result<()> {
    o.param("instance", path_value(&a.instance));
    let sys = read_system(&a.instance)?;
    group_outputs(o, sys.params());
    let stats = degree_profile(&sys)?;
    o.output("triangles", stats.total);
    o.output("delta", rational(&stats.delta));
    o.output("max_degree", stats.max_degree);
    o.output("rho", rational(&stats.rho));
    let mut table = Table::new(&["role", "point", "degree"]);
    let mut per_role = serde_json::Map::new();
    for role in Role::ALL {
        let degs = stats.degrees(role);
        per_role.insert(
            role.as_str().to_string(),
            json!(sys.set(role).iter().map(|u| degs[u.0 as usize]).max().unwrap_or(0)),
        );
        for u in sys.set(role).iter() {
            table.push(vec![role.as_str().into(), u.0.to_string(), degs[u.0 as usize].to_string()]);
        }
    }
    o.output("max_degree_by_role", Value::Object(per_role));
    o.summary = format!("{} triangles, max degree {}", stats.total, stats.max_degree);
    o.table = Some(table);
    Ok(())
}

fn random_system(g: GroupParams, density: f64, rng: &mut ChaCha8Rng) -> Result<TripleSystem> {
    let mut pick = || PointSet::from_points(g, g.points().filter(|_| rng.gen_bool(density)).collect::<Vec<_>>());
    let x = pick()?;
    let y = pick()?;
    let z = pick()?;
    Ok(TripleSystem::new(x, y, z)?)
}

fn planted_system(g: GroupParams, m: u64, rng: &mut ChaCha8Rng) -> Result<TripleSystem> {
    let mut sets = [PointSet::empty(g)?, PointSet::empty(g)?, PointSet::empty(g)?];
    for _ in 0..m {
        let x = Point(rng.gen_range(0..g.order()));
        let y = Point(rng.gen_range(0..g.order()));
        let t = Triangle::new(&g, x, y, g.third(x, y))?;
        for (set, role) in sets.iter_mut().zip(Role::ALL) {
            set.insert(t.point(role))?;
        }
    }
    let [x, y, z] = sets;
    Ok(TripleSystem::new(x, y, z)?)
}

fn construct(a: &ConstructArgs, ctx: &Ctx, o: &mut Outcome) -> Result<()> {
    o.param("kind", format!("{:?}", a.kind).to_lowercase());
    o.param("p", a.p);
    o.param("n", a.n);
    let g = GroupParams::new(a.p, a.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let sys = match a.kind {
        ConstructKind::Full => TripleSystem::full(g)?,
        ConstructKind::Random => {
            ensure!(
                (0.0..=1.0).contains(&a.density),
                "density must lie in [0, 1], got {}",
                a.density
            );
            o.param("density", real(a.density));
            random_system(g, a.density, &mut rng)?
        }
        ConstructKind::Planted => {
            o.param("m", a.m);
            planted_system(g, a.m, &mut rng)?
        }
    };
    group_outputs(o, &g);
    set_sizes(o, &sys);
    let total = count_transform(&sys)?;
    o.output("triangles", total);
    o.output("delta", rational(&delta_of(&sys, total)));
    let file = ctx.emit("fpn", &format_system(&sys))?;
    o.output("instance_file", file.clone());
    o.summary = format!("{total} triangles, instance {file}");
    Ok(())
}

enum Loaded {
    System(TripleSystem),
    Matched(MatchedTriples),
}

fn load(source: &Source, o: &mut Outcome) -> Result<Loaded> {
    match (&source.instance, &source.matched) {
        (Some(path), _) => {
            o.param("instance", path_value(path));
            Ok(Loaded::System(read_system(path)?))
        }
        (None, Some(path)) => {
            o.param("matched", path_value(path));
            Ok(Loaded::Matched(read_matched(path)?))
        }
        (None, None) => Err(anyhow!("one of --instance or --matched is required")),
    }
}

fn lift(a: &SourceArgs, ctx: &Ctx, o: &mut Outcome) -> Result<()> {
    match load(&a.source, o)? {
        Loaded::System(sys) => {
            let lifted = lift_system(&sys)?;
            let before = count_transform(&sys)?;
            let after = count_transform(&lifted)?;
            let report = lift_structure(&lifted)?;
            group_outputs(o, lifted.params());
            o.output("triangles_before", before);
            o.output("triangles_after", after);
            o.output("disjoint", report.disjoint);
            o.output("pairwise_independent", report.pairwise_independent);
            o.output("max_triangles_per_plane", report.max_triangles_per_plane);
            o.output("structure_holds", report.holds());
            ensure!(
                before == after,
                removal_lab::Error::Invariant(format!("lift changed the count from {before} to {after}"))
            );
            if a.emit {
                o.output("instance_file", ctx.emit("fpn", &format_system(&lifted))?);
            }
            o.summary = format!(
                "F_{}^{} with {after} triangles, structure {}",
                lifted.params().p(),
                lifted.params().n(),
                if report.holds() { "holds" } else { "fails" }
            );
        }
        Loaded::Matched(m) => {
            let lifted = lift_plus_two(&m)?;
            let cross_free = verify_matching(&lifted);
            group_outputs(o, lifted.params());
            o.output("m", lifted.len());
            o.output("cross_free", cross_free);
            if a.emit {
                o.output("matched_file", ctx.emit("matched", &format_matched(&lifted))?);
            }
            o.summary = format!(
                "{} triples in F_{}^{}, cross-free: {cross_free}",
                lifted.len(),
                lifted.params().p(),
                lifted.params().n()
            );
        }
    }
    Ok(())
}

fn tensor(a: &TensorArgs, ctx: &Ctx, o: &mut Outcome) -> Result<()> {
    o.param("k", a.k);
    match load(&a.source, o)? {
        Loaded::System(sys) => {
            let power = tensor_power_system(&sys, a.k)?;
            let base = count_transform(&sys)?;
            let count = count_transform(&power)?;
            let expected = (base as u128).checked_pow(a.k);
            group_outputs(o, power.params());
            o.output("base_triangles", base);
            o.output("triangles", count);
            o.output("expected", expected.map_or(Value::Null, big));
            ensure!(
                expected == Some(count as u128),
                removal_lab::Error::Invariant(format!("tensor power has {count} triangles, expected {base}^{}", a.k))
            );
            if a.emit {
                o.output("instance_file", ctx.emit("fpn", &format_system(&power))?);
            }
            o.summary = format!("{count} triangles = {base}^{}", a.k);
        }
        Loaded::Matched(m) => {
            let m = m.verified();
            ensure!(m.is_cross_free(), "the base collection is not cross-free");
            let power = tensor_power_matched(&m, a.k)?;
            let cross_free = verify_matching(&power);
            group_outputs(o, power.params());
            o.output("m", power.len());
            o.output("cross_free", cross_free);
            if a.emit {
                o.output("matched_file", ctx.emit("matched", &format_matched(&power))?);
            }
            o.summary = format!("{} triples, cross-free: {cross_free}", power.len());
        }
    }
    Ok(())
}

fn blowup(a: &BlowupArgs, ctx: &Ctx, o: &mut Outcome) -> Result<()> {
    o.param("matched", path_value(&a.matched));
    o.param("l", a.l);
    o.param("check", a.check);
    let m = read_matched(&a.matched)?.verified();
    ensure!(m.is_cross_free(), "the base collection is not cross-free");
    let b = product_blowup(&m, a.l)?;
    group_outputs(o, &b.params);
    o.output("m", b.m);
    o.output("triangles", big(b.triangle_count()));
    o.output("deletion_number", big(b.deletion_number()));
    o.output("epsilon", rational(&b.epsilon()));
    o.output("delta", rational(&b.delta()));
    o.output("exponent", family_exponent(&b.epsilon(), &b.delta()).map_or(Value::Null, real));
    o.output("materialized", b.system.is_some());
    if a.check || a.emit {
        let sys = b.system.as_ref().ok_or_else(|| {
            removal_lab::Error::Capacity {
                what: format!("blow-up of order {} is not materialized", b.params.order()),
                count: Some(b.params.order() as u128),
            }
        })?;
        if a.check {
            let count = count_transform(sys)?;
            let greedy = greedy_disjoint(sys).len();
            o.output("counted_triangles", count);
            o.output("greedy", greedy);
            ensure!(
                count as u128 == b.triangle_count(),
                removal_lab::Error::Invariant(format!("counted {count}, formula gives {}", b.triangle_count()))
            );
        }
        if a.emit {
            o.output("instance_file", ctx.emit("fpn", &format_system(sys))?);
        }
    }
    o.summary = format!(
        "{} triangles, deletion number {}, ε = {}, δ = {}",
        b.triangle_count(),
        b.deletion_number(),
        rational_str(&b.epsilon()),
        rational_str(&b.delta())
    );
    Ok(())
}

fn greedy(a: &InstanceArgs, o: &mut Outcome) -> Result<()> {
    o.param("instance", path_value(&a.instance));
    let sys = read_system(&a.instance)?;
    group_outputs(o, sys.params());
    let found = greedy_disjoint(&sys);
    let mut table = Table::new(&["x", "y", "z"]);
    for t in found.triples() {
        table.push(vec![t.x.0.to_string(), t.y.0.to_string(), t.z.0.to_string()]);
    }
    o.output("size", found.len());
    o.output("deletion_upper_bound", 3 * found.len());
    o.summary = format!("{} disjoint triangles", found.len());
    o.table = Some(table);
    Ok(())
}

fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| anyhow!("`{s}` is not a rational `a/b`"))
}

fn prune(a: &PruneArgs, o: &mut Outcome) -> Result<()> {
    o.param("instance", path_value(&a.instance));
    let eps = parse_rational(&a.eps)?;
    o.param("eps", rational(&eps));
    let sys = read_system(&a.instance)?;
    let g = *sys.params();
    group_outputs(o, &g);
    let schedule = build_prune_schedule(g.p())?;
    let trace = prune_high_degree(&sys, &eps, &schedule)?;
    let delta0 = *trace.initial_delta.numer() as f64 / *trace.initial_delta.denom() as f64;
    o.output("a_p_log2", schedule.a_p_log2);
    o.output("initial_delta", rational(&trace.initial_delta));
    o.output("eps_threshold", real(schedule.eps_threshold(delta0)));
    o.output("removed", trace.removed());
    o.output("within_half_eps", trace.within_half_eps(&eps));
    o.output("final_max_degree", trace.final_max_degree);
    o.output("final_threshold", trace.final_threshold.map_or(Value::Null, real));
    let mut table = Table::new(&["step", "role", "point", "degree", "threshold", "delta_after"]);
    for (i, s) in trace.steps.iter().enumerate() {
        table.push(vec![
            (i + 1).to_string(),
            s.role.as_str().into(),
            s.point.0.to_string(),
            s.degree.to_string(),
            s.threshold.to_string(),
            rational_str(&s.delta_after),
        ]);
    }
    o.summary = format!(
        "removed {} of {} points, final max degree {}",
        trace.removed(),
        sys.total_points(),
        trace.final_max_degree
    );
    o.table = Some(table);
    Ok(())
}

fn subspace_sim(a: &SubspaceArgs, ctx: &Ctx, o: &mut Outcome) -> Result<()> {
    o.param("trials", a.trials);
    if let Some(target) = a.target {
        let (p, n, d) = match (a.p, a.n, a.d) {
            (Some(p), Some(n), Some(d)) => (p, n, d),
            _ => bail!("membership trials need --p, --n and --d"),
        };
        o.param("p", p);
        o.param("n", n);
        o.param("d", d);
        o.param("target", target);
        let g = GroupParams::new(p, n)?;
        let target = g.point(target)?;
        let r = match &a.fixed {
            Some(f) => {
                o.param("fixed", json!(f));
                let (u, v) = (g.point(f[0])?, g.point(f[1])?);
                conditional_membership_experiment(&g, d, (u, v), target, a.trials, ctx.seed)?
            }
            None => membership_experiment(&g, d, target, a.trials, ctx.seed)?,
        };
        o.output("hits", r.hits);
        o.output("frequency", real(r.frequency));
        o.output("expected", real(r.expected));
        o.output("std_error", real(r.std_error));
        o.output("within_4_sigma", r.within_sigmas(4.0));
        o.summary = format!("frequency {:.5} vs expected {:.5} (se {:.5})", r.frequency, r.expected, r.std_error);
        return Ok(());
    }
    let path = a.instance.as_ref().ok_or_else(|| anyhow!("--instance or --target is required"))?;
    o.param("instance", path_value(path));
    let sys = read_system(path)?;
    let g = *sys.params();
    group_outputs(o, &g);
    let d = match a.d {
        Some(d) => d,
        None => {
            let stats = degree_profile(&sys)?;
            ensure!(stats.total > 0, "the instance has no triangles; pass --d explicitly");
            let rho = *stats.rho.numer() as f64 / *stats.rho.denom() as f64;
            let choice = choose_dimension(g.p(), rho)?;
            o.output("d_below_three", choice.below_three);
            choice.d
        }
    };
    o.param("d", d);
    let r = subspace_experiment(&sys, d, a.trials, ctx.seed, ctx.threads)?;
    o.output("ambient_triangles", r.ambient_total);
    o.output("delta", rational(&r.delta));
    o.output("rho", rational(&r.rho));
    o.output("rho_p_d", real(r.rho_p_d));
    o.output("total_restricted", r.total_restricted);
    o.output("total_good", r.total_good);
    o.output("mean_restricted_t", real(r.mean_restricted_t));
    o.output("expected_restricted_t", real(r.expected_restricted_t));
    o.output("mean_good_t", real(r.mean_good_t));
    o.output("good_t_std_error", real(r.good_t_std_error));
    o.output("max_good_t", r.max_good_t);
    o.output("good_fraction_given_survival", real(r.good_fraction_given_survival));
    o.output("good_fraction_std_error", real(r.good_fraction_std_error));
    o.output("rhs", real(r.rhs));
    o.output("capacity", real(r.capacity));
    o.output("capacity_violations", r.capacity_violations);
    if a.per_trial {
        let counts = subspace_trial_counts(&sys, d, a.trials, ctx.seed, ctx.threads)?;
        let mut table = Table::new(&["trial", "restricted", "good"]);
        for (i, (t, good)) in counts.iter().enumerate() {
            table.push(vec![i.to_string(), t.to_string(), good.to_string()]);
        }
        o.table = Some(table);
    }
    o.summary = format!(
        "d = {d}: mean good {:.4} (se {:.4}) vs rhs {:.3e}, {} capacity violations",
        r.mean_good_t, r.good_t_std_error, r.rhs, r.capacity_violations
    );
    Ok(())
}

fn budget_params(b: &Budget, o: &mut Outcome) {
    o.param("max_nodes", b.max_nodes);
    o.param("max_seconds", real(b.max_seconds));
}

fn oracle_mindel(a: &MindelArgs, o: &mut Outcome) -> Result<()> {
    o.param("instance", path_value(&a.instance));
    budget_params(&a.budget, o);
    let sys = read_system(&a.instance)?;
    group_outputs(o, sys.params());
    let r = min_deletion_exact(&sys, a.budget.oracle())?;
    let greedy = greedy_disjoint(&sys).len();
    o.output("status", r.status.as_str());
    o.output("min_deletion", r.value);
    o.output("lower_bound", r.lower_bound);
    o.output("triangles", r.triangles);
    o.output("greedy", greedy);
    o.output("nodes", r.nodes);
    let mut table = Table::new(&["role", "point"]);
    for (role, u) in &r.deletion {
        table.push(vec![role.as_str().into(), u.0.to_string()]);
    }
    o.table = Some(table);
    o.budget_exhausted = r.status == OracleStatus::BudgetExhausted;
    o.summary = match r.status {
        OracleStatus::Exact => format!("minimum deletion {} ({} triangles)", r.value, r.triangles),
        OracleStatus::BudgetExhausted => {
            format!("budget exhausted: {} ≤ minimum deletion ≤ {}", r.lower_bound, r.value)
        }
    };
    Ok(())
}

fn oracle_maxmatch(a: &MaxmatchArgs, ctx: &Ctx, o: &mut Outcome) -> Result<()> {
    o.param("p", a.p);
    o.param("n", a.n);
    o.param("no_cap", a.no_cap);
    budget_params(&a.budget, o);
    let r = max_matched_exact(a.p, a.n, a.budget.oracle(), !a.no_cap)?;
    o.output("status", r.status.as_str());
    o.output("max_matched", r.best.len());
    o.output("cap", r.cap);
    o.output("used_cap", r.used_cap);
    o.output("nodes", r.nodes);
    let mut table = Table::new(&["x", "y", "z"]);
    for t in r.best.triples() {
        table.push(vec![t.x.0.to_string(), t.y.0.to_string(), t.z.0.to_string()]);
    }
    o.table = Some(table);
    if a.emit {
        o.output("matched_file", ctx.emit("matched", &format_matched(&r.best))?);
    }
    o.budget_exhausted = r.status == OracleStatus::BudgetExhausted;
    o.summary = format!("{} {} (cap {}, {} nodes)", r.status.as_str(), r.best.len(), r.cap, r.nodes);
    Ok(())
}

fn audit(a: &MindelArgs, o: &mut Outcome) -> Result<()> {
    o.param("instance", path_value(&a.instance));
    budget_params(&a.budget, o);
    let sys = read_system(&a.instance)?;
    group_outputs(o, sys.params());
    let r = theorem1_audit(&sys, a.budget.oracle())?;
    o.output("triangles", r.triangles);
    o.output("min_deletion", r.min_deletion.map_or(Value::Null, Value::from));
    o.output("greedy", r.greedy);
    o.output("rhs", r.rhs.map_or(Value::Null, real));
    o.output("holds", r.holds.map_or(Value::Null, Value::from));
    o.output("skipped", r.skipped.clone().map_or(Value::Null, Value::from));
    o.budget_exhausted = r.holds.is_none();
    o.summary = match (r.holds, &r.skipped) {
        (Some(true), _) => format!("holds: {} triangles ≥ {:.4e}", r.triangles, r.rhs.unwrap_or(0.0)),
        (Some(false), _) => format!("VIOLATED: {} triangles < {:.4e}", r.triangles, r.rhs.unwrap_or(0.0)),
        (None, reason) => format!("skipped: {}", reason.as_deref().unwrap_or("unknown")),
    };
    Ok(())
}

fn frontier(a: &FrontierArgs, o: &mut Outcome) -> Result<()> {
    o.param("kmax", a.kmax);
    let base = match (&a.matched, a.base_n) {
        (Some(path), _) => {
            o.param("matched", path_value(path));
            read_matched(path)?.verified()
        }
        (None, Some(n)) => {
            let p = a.p.ok_or_else(|| anyhow!("--base-n needs --p"))?;
            o.param("p", p);
            o.param("base_n", n);
            budget_params(&a.budget, o);
            let r = max_matched_exact(p, n, a.budget.oracle(), true)?;
            if r.status == OracleStatus::BudgetExhausted {
                o.budget_exhausted = true;
            }
            r.best
        }
        (None, None) => bail!("one of --base-n or --matched is required"),
    };
    ensure!(base.is_cross_free(), "the base collection is not cross-free");
    let g = *base.params();
    let big_c = solve_exponent(g.p(), removal_lab::exponents::DEFAULT_TOL)?.big_c_p;
    let rows = family_curve(std::slice::from_ref(&base), a.kmax)?;
    let mut table = Table::new(&["nk", "m_k", "epsilon", "delta", "exponent"]);
    let mut max_exp: Option<f64> = None;
    for r in &rows {
        if let Some(e) = r.exponent {
            max_exp = Some(max_exp.map_or(e, |m| m.max(e)));
        }
        table.push(vec![
            r.n.to_string(),
            r.m.to_string(),
            rational_str(&r.epsilon),
            rational_str(&r.delta),
            r.exponent.map_or_else(String::new, |e| e.to_string()),
        ]);
    }
    o.output("p", g.p());
    o.output("base_n", g.n());
    o.output("base_m", base.len());
    o.output("rows", rows.len());
    o.output("C_p", real(big_c));
    o.output("max_exponent", max_exp.map_or(Value::Null, real));
    o.output("below_C_p", max_exp.is_none_or(|e| e <= big_c));
    o.summary = format!(
        "{} rows from m = {} in F_{}^{}, exponent {} vs C_p = {:.6}",
        rows.len(),
        base.len(),
        g.p(),
        g.n(),
        max_exp.map_or("undefined".to_string(), |e| format!("{e:.6}")),
        big_c
    );
    o.table = Some(table);
    Ok(())
}
