use monocount_core::census::{
    b_statistic, count_c4, pyramid_counts, s_statistic, score_ordering, triangle_census,
};
use monocount_core::fourthmoment::fourth_moment_exact_with_budget;
use monocount_core::moments::{clt_bound_t2, clt_bound_t3, t2_moments, t3_mean_var, T2Counts};
use monocount_core::report::Exact;
use monocount_core::sim::{
    exact_distribution_with_cap, sample_statistics, write_raw, AtomSpec, ExactMoments,
};
use monocount_core::verify;
use monocount_core::{PyramidCounts, SimConfig, Statistic, StatisticChoice};
use num_bigint::BigUint;
use serde::Serialize;

use crate::{
    emit, write_atomic, BoundsArgs, CensusArgs, CliError, Envelope, FourthMomentArgs, GenerateArgs,
    MomentsArgs, SimulateArgs, StatArg, VerifyArgs,
};

fn big(n: &BigUint) -> String {
    n.to_string()
}

pub fn generate(mut a: GenerateArgs) -> Result<(), CliError> {
    if a.input.input.is_some() {
        return Err(CliError::Usage(
            "generate takes --family or --spec, not --input".into(),
        ));
    }
    if a.seed.is_some() {
        a.input.graph_seed = a.seed;
    }
    let loaded = a.input.load(a.c)?;
    emit(&a.out.out, &loaded.graph.to_edge_list())
}

#[derive(Serialize)]
struct CensusConfig {
    c: Option<u32>,
}

#[derive(Serialize)]
struct CensusResult {
    vertices: usize,
    edges: usize,
    triangles: usize,
    pyramids: PyramidCounts,
    four_cycles: String,
    b: String,
    /// `s` under the score ordering
    s: String,
    /// Highest-scoring vertices first, at most 10
    score_order_head: Vec<u32>,
}

pub fn census(a: CensusArgs) -> Result<(), CliError> {
    let loaded = a.input.load(a.c)?;
    let g = &loaded.graph;
    let tc = triangle_census(g);
    let order = score_ordering(g, &tc);
    let result = CensusResult {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        triangles: tc.triangle_count(),
        pyramids: pyramid_counts(&tc),
        four_cycles: big(&count_c4(g)),
        b: big(&b_statistic(g, &tc)),
        s: big(&s_statistic(g, &tc, &order)),
        score_order_head: order.iter().take(10).copied().collect(),
    };
    let env = Envelope::new("census", CensusConfig { c: a.c }, Some(loaded.info), result);
    emit(&a.out.out, &env.to_json())
}

#[derive(Serialize)]
struct MomentsConfig {
    c: u32,
    statistic: StatArg,
}

pub fn moments(a: MomentsArgs) -> Result<(), CliError> {
    let loaded = a.input.load(Some(a.c))?;
    let g = &loaded.graph;
    let choice: StatisticChoice = a.statistic.into();
    let mut reports = Vec::new();
    if matches!(choice, StatisticChoice::T2 | StatisticChoice::Both) {
        reports.push(t2_moments(&T2Counts::of(g), a.c)?);
    }
    if matches!(choice, StatisticChoice::T3 | StatisticChoice::Both) {
        let pc = pyramid_counts(&triangle_census(g));
        match t3_mean_var(&pc, a.c) {
            Ok(r) => reports.push(r),
            // a triangle-free graph only matters when T3 was asked for alone
            Err(monocount_core::Error::NoTriangles) if choice == StatisticChoice::Both => {}
            Err(e) => return Err(e.into()),
        }
    }
    let config = MomentsConfig {
        c: a.c,
        statistic: a.statistic,
    };
    let env = Envelope::new("moments", config, Some(loaded.info), reports);
    emit(&a.out.out, &env.to_json())
}

#[derive(Serialize)]
struct BoundsConfig {
    c: u32,
}

#[derive(Serialize)]
struct BoundsResult {
    t3: Option<monocount_core::moments::T3BoundReport>,
    t2: monocount_core::moments::T2BoundReport,
}

pub fn bounds(a: BoundsArgs) -> Result<(), CliError> {
    let loaded = a.input.load(Some(a.c))?;
    let g = &loaded.graph;
    let tc = triangle_census(g);
    let pc = pyramid_counts(&tc);
    let t3 = match clt_bound_t3(&pc, &b_statistic(g, &tc)) {
        Ok(r) => Some(r),
        Err(monocount_core::Error::NoTriangles) => None,
        Err(e) => return Err(e.into()),
    };
    let t2 = clt_bound_t2(&BigUint::from(g.edge_count()), &count_c4(g), a.c)?;
    let env = Envelope::new(
        "bounds",
        BoundsConfig { c: a.c },
        Some(loaded.info),
        BoundsResult { t3, t2 },
    );
    emit(&a.out.out, &env.to_json())
}

#[derive(Serialize)]
struct FourthMomentConfig {
    c: u32,
    budget: u64,
}

pub fn fourth_moment(a: FourthMomentArgs) -> Result<(), CliError> {
    let loaded = a.input.load(Some(a.c))?;
    let tc = triangle_census(&loaded.graph);
    let pc = pyramid_counts(&tc);
    let d = fourth_moment_exact_with_budget(&tc, &pc, a.c, a.budget)?;
    let config = FourthMomentConfig {
        c: a.c,
        budget: a.budget,
    };
    let env = Envelope::new("fourth-moment", config, Some(loaded.info), d);
    emit(&a.out.out, &env.to_json())
}

#[derive(Serialize)]
struct SimulateConfig<'a> {
    #[serde(flatten)]
    sim: &'a SimConfig,
    atoms: Option<&'a AtomSpec>,
}

#[derive(Serialize)]
struct ExactConfig {
    c: u32,
    statistic: StatArg,
    exact: bool,
    cap: u64,
}

#[derive(Serialize)]
struct ExactStat {
    statistic: Statistic,
    mean: Exact,
    variance: Exact,
    central4: Exact,
    excess4: Option<Exact>,
    pmf: Vec<(u64, Exact)>,
}

impl ExactStat {
    fn new(statistic: Statistic, m: ExactMoments, pmf: Vec<(u64, Exact)>) -> Self {
        ExactStat {
            statistic,
            excess4: m.excess4().map(Exact),
            mean: Exact(m.mean),
            variance: Exact(m.variance),
            central4: Exact(m.central4),
            pmf,
        }
    }
}

pub fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let loaded = a.input.load(Some(a.c))?;
    let g = &loaded.graph;
    let tc = triangle_census(g);
    let choice: StatisticChoice = a.statistic.into();
    if a.exact {
        let dist = exact_distribution_with_cap(g, &tc, a.c, a.cap)?;
        let mut stats = Vec::new();
        for (s, want) in [
            (
                Statistic::T2,
                matches!(choice, StatisticChoice::T2 | StatisticChoice::Both),
            ),
            (
                Statistic::T3,
                matches!(choice, StatisticChoice::T3 | StatisticChoice::Both),
            ),
        ] {
            if want {
                let pmf = dist
                    .pmf(s)
                    .into_iter()
                    .map(|(v, p)| (v, Exact(p)))
                    .collect();
                stats.push(ExactStat::new(s, dist.moments(s), pmf));
            }
        }
        let config = ExactConfig {
            c: a.c,
            statistic: a.statistic,
            exact: true,
            cap: a.cap,
        };
        let env = Envelope::new("simulate", config, Some(loaded.info), stats);
        return emit(&a.out.out, &env.to_json());
    }
    let cfg = SimConfig {
        c: a.c,
        replications: a.reps,
        seed: a.seed.expect("clap requires --seed"),
        statistic: choice,
    };
    let atoms = a
        .atom_scale
        .zip(a.atom_gap)
        .map(|(scale, gap)| AtomSpec { scale, gap });
    if let Some(spec) = &atoms {
        if !(spec.scale > 0.0 && spec.gap > 0.0) {
            return Err(CliError::Usage(
                "--atom-scale and --atom-gap must be positive".into(),
            ));
        }
    }
    let (report, samples) = sample_statistics(g, &tc, &cfg, atoms)?;
    let raw = a.raw_out.as_ref().map(|_| {
        let values: Vec<u64> = match (&samples.t2, &samples.t3) {
            (Some(t2), Some(t3)) => t2.iter().zip(t3).flat_map(|(&x, &y)| [x, y]).collect(),
            (Some(v), None) | (None, Some(v)) => v.clone(),
            (None, None) => Vec::new(),
        };
        let mut bytes = Vec::with_capacity(values.len() * 8);
        write_raw(&mut bytes, &values).expect("writing to memory");
        bytes
    });
    let config = SimulateConfig {
        sim: &report.config,
        atoms: atoms.as_ref(),
    };
    let env = Envelope::new(
        "simulate",
        config,
        Some(loaded.info),
        &report.statistics,
    );
    let text = env.to_json();
    if let (Some(path), Some(bytes)) = (&a.raw_out, raw) {
        write_atomic(path, &bytes)?;
    }
    emit(&a.out.out, &text)
}

#[derive(Serialize)]
struct VerifyConfig {
    full: bool,
    reps: Option<u64>,
    seed: Option<u64>,
}

#[derive(Serialize)]
struct VerifyResult {
    passed: usize,
    failed: usize,
    checks: Vec<verify::CheckOutcome>,
}

pub fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let checks = if a.full {
        verify::all_checks(a.reps, a.seed)
    } else {
        verify::exact_checks()
    };
    for c in &checks {
        eprintln!("{}", c.line());
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let config = VerifyConfig {
        full: a.full,
        reps: a.full.then_some(a.reps),
        seed: a.full.then_some(a.seed),
    };
    let result = VerifyResult {
        passed: checks.len() - failed,
        failed,
        checks,
    };
    emit(
        &a.out.out,
        &Envelope::new("verify", config, None, result).to_json(),
    )?;
    if failed > 0 {
        Err(CliError::Failed)
    } else {
        Ok(())
    }
}
