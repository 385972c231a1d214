//! End-to-end acceptance checks, one test per criterion. Each test prints a
//! `criterion N: PASS` line with the measured margins; tolerances and
//! budgets are pinned as constants. Tests share the expensive solved set
//! through lazily initialized statics, and the test names order the run so
//! the solving pass happens exactly once.

use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sdpc::channel::{leakage_gap, AlignedChannelSpec, ChannelSpec};
use sdpc::enhance::{construct_enhanced, Enhancement};
use sdpc::kkt::{fit_certificate, ns_correspondence_check, KktCertificate};
use sdpc::linalg::PsdMatrix;
use sdpc::oracle::{scalar_boundary, scalar_general_boundary, weighted_max, GridSpec};
use sdpc::random::{
    random_aligned_channel, random_feasible_pair, random_general_channel, rng_from_seed,
};
use sdpc::rates::{achievability_check, rate_triple, AuxiliaryScheme, CovariancePair, Order};
use sdpc::solver::{maximize_weighted, simplex_weights, solve_general, BoundaryPoint, Weights};

// Criterion 1: closed-form rates against mutual-information chains.
const ACHIEVABILITY_SCHEMES: usize = 1000;
const ACHIEVABILITY_TOL: f64 = 1e-9;
const ACHIEVABILITY_BUDGET: Duration = Duration::from_secs(60);

// Criterion 2: encoding-order invariance of the solved objective.
const SCALAR_CHANNELS: usize = 100;
const ALIGNED_CHANNELS: usize = 50;
const SOLVER_RESTARTS: usize = 16;
const SCALAR_ORDER_GAP_TOL: f64 = 1e-4;
const ALIGNED_ORDER_GAP_TOL: f64 = 1e-3;
const ORDER_BUDGET: Duration = Duration::from_secs(600);

// Criterion 3: solver against the scalar brute-force grid.
const ORACLE_RESOLUTION: usize = 1024;
const ORACLE_TOL: f64 = 1e-3;
const ORACLE_BUDGET: Duration = Duration::from_secs(120);

// Criterion 4: certificate residuals at every criterion-2 output.
const STATIONARITY_TOL: f64 = 1e-5;
const SLACKNESS_REL_TOL: f64 = 1e-6;

// Criterion 5: enhancement identities.
const HAND_RESIDUAL_TOL: f64 = 1e-10;
const FITTED_RESIDUAL_FACTOR: f64 = 10.0;
const ENHANCE_BUDGET: Duration = Duration::from_secs(30);

// Criterion 6: converse value against the achieved objective.
const CONVERSE_FLOOR: f64 = 1e-9;

// Criterion 7: extremal inequality over random auxiliary covariances.
const EXTREMAL_DRAWS: usize = 1000;
const EXTREMAL_FLOOR: f64 = -1e-9;
const EXTREMAL_EQUALITY_TOL: f64 = 1e-9;

// Criterion 8: alignment leakage bound and the general-to-aligned reduction.
const LEAKAGE_SPECS: usize = 40;
const LEAKAGE_TOL: f64 = 1e-5;
const ALPHA_GRID: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
const REDUCTION_ALPHA: f64 = 1e-6;
const REDUCTION_TOL: f64 = 1e-4;

// Criterion 9: non-secret correspondence at scalar channels.
const NS_RESOLUTION: usize = 4096;
const NS_ORDER_TOL: f64 = 1e-6;

/// Weight pinned to its full value by the fit: the certificate covers the
/// branch the enhancement construction assumes.
fn full_weight(nu: f64, mu: f64) -> bool {
    (nu - mu).abs() <= 1e-9 * mu.max(1.0)
}

fn random_simplex_weight(rng: &mut ChaCha8Rng) -> Weights {
    let e = |r: &mut ChaCha8Rng| -(r.random::<f64>().max(1e-12)).ln();
    let (a, b, c) = (e(rng), e(rng), e(rng));
    let s = a + b + c;
    Weights::new(a / s, b / s, c / s).unwrap()
}

/// One solved boundary point with everything needed to re-verify it.
struct Solved {
    c: AlignedChannelSpec,
    w: Weights,
    order: Order,
    point: BoundaryPoint,
}

struct SolvedSet {
    solved: Vec<Solved>,
    worst_scalar_gap: f64,
    worst_aligned_gap: f64,
    worst_above_oracle: f64,
    elapsed: Duration,
}

/// Criterion-2 workload: solves both orders on 100 random scalar channels
/// (each confirmed against the grid oracle) and 50 random aligned channels
/// with t in {2, 3}. Shared with criteria 4, 6, and 7.
fn solved_set() -> &'static SolvedSet {
    static SET: OnceLock<SolvedSet> = OnceLock::new();
    SET.get_or_init(|| {
        let start = Instant::now();
        let mut rng = rng_from_seed(1002);
        let grid = GridSpec::new(ORACLE_RESOLUTION).unwrap();
        let mut solved = Vec::with_capacity(2 * (SCALAR_CHANNELS + ALIGNED_CHANNELS));
        let mut worst_scalar_gap = 0.0f64;
        let mut worst_above_oracle = 0.0f64;
        for i in 0..SCALAR_CHANNELS as u64 {
            let c = random_aligned_channel(&mut rng, 1);
            let w = random_simplex_weight(&mut rng);
            let p12 = maximize_weighted(&w, &c, Order::Order12, SOLVER_RESTARTS, 2000 + i).unwrap();
            let p21 = maximize_weighted(&w, &c, Order::Order21, SOLVER_RESTARTS, 2000 + i).unwrap();
            let gap = (p12.objective - p21.objective).abs() / p12.objective.abs().max(1.0);
            worst_scalar_gap = worst_scalar_gap.max(gap);
            let pts = scalar_boundary(&c, &grid, Order::Order12).unwrap();
            let oracle = weighted_max(&pts, w.mu0, w.mu1, w.mu2)
                .unwrap()
                .rates
                .weighted(w.mu0, w.mu1, w.mu2);
            assert!(
                p12.objective >= oracle - 1e-9,
                "scalar channel {i}: solver {} below oracle {oracle}",
                p12.objective
            );
            worst_above_oracle = worst_above_oracle.max(p12.objective - oracle);
            solved.push(Solved { c: c.clone(), w, order: Order::Order12, point: p12 });
            solved.push(Solved { c, w, order: Order::Order21, point: p21 });
        }
        let mut worst_aligned_gap = 0.0f64;
        for i in 0..ALIGNED_CHANNELS {
            let t = 2 + (i % 2);
            let c = random_aligned_channel(&mut rng, t);
            let w = random_simplex_weight(&mut rng);
            let seed = 3000 + i as u64;
            let p12 = maximize_weighted(&w, &c, Order::Order12, SOLVER_RESTARTS, seed).unwrap();
            let p21 = maximize_weighted(&w, &c, Order::Order21, SOLVER_RESTARTS, seed).unwrap();
            let gap = (p12.objective - p21.objective).abs() / p12.objective.abs().max(1.0);
            worst_aligned_gap = worst_aligned_gap.max(gap);
            solved.push(Solved { c: c.clone(), w, order: Order::Order12, point: p12 });
            solved.push(Solved { c, w, order: Order::Order21, point: p21 });
        }
        SolvedSet {
            solved,
            worst_scalar_gap,
            worst_aligned_gap,
            worst_above_oracle,
            elapsed: start.elapsed(),
        }
    })
}

/// Certificates fitted at every solved point, parallel to `solved_set`.
fn certificates() -> &'static Vec<KktCertificate> {
    static CERTS: OnceLock<Vec<KktCertificate>> = OnceLock::new();
    CERTS.get_or_init(|| {
        solved_set()
            .solved
            .iter()
            .map(|s| fit_certificate(&s.point.pair, &s.w, &s.c, s.order).unwrap())
            .collect()
    })
}

/// A certified boundary tuple ready for the converse and extremal checks.
struct Certified {
    c: AlignedChannelSpec,
    w: Weights,
    pair: CovariancePair,
    cert: KktCertificate,
    objective: f64,
    hand_solved: bool,
}

fn scalar_pair(k1: f64, k2: f64) -> CovariancePair {
    CovariancePair::new(PsdMatrix::scalar(k1), PsdMatrix::scalar(k2)).unwrap()
}

fn exact_certificate(m1: f64, m2: f64, ms: f64, nu1: f64, nu2: f64) -> KktCertificate {
    KktCertificate {
        m1: PsdMatrix::scalar(m1),
        m2: PsdMatrix::scalar(m2),
        ms: PsdMatrix::scalar(ms),
        lambda: 0.0,
        nu1,
        nu2,
        residual_stationarity: 0.0,
        residual_slackness: 0.0,
        slackness_scale: 1.0,
        order: Order::Order12,
        lambda_scan: None,
        warnings: Vec::new(),
    }
}

fn certified(c: AlignedChannelSpec, w: Weights, pair: CovariancePair, cert: KktCertificate,
             hand_solved: bool) -> Certified {
    let objective = rate_triple(&pair, &c.to_channel(), cert.order)
        .unwrap()
        .weighted(w.mu0, w.mu1, w.mu2);
    Certified { c, w, pair, cert, objective, hand_solved }
}

/// Criterion-5 tuples: three closed-form scalar certificates, then fitted
/// certificates at solver outputs on a 2x2 and a scalar channel.
fn certified_tuples() -> &'static (Vec<Certified>, Duration) {
    static TUPLES: OnceLock<(Vec<Certified>, Duration)> = OnceLock::new();
    TUPLES.get_or_init(|| {
        let start = Instant::now();
        let mut tuples = Vec::new();

        // Hand-solved: sigma = (1, 2), s = 1, weight on user 1's branch
        // only; optimum (1, 0) with MS - M1 = 1/6 and M2 = 1/2.
        tuples.push(certified(
            AlignedChannelSpec::scalar(1.0, 2.0, 1.0).unwrap(),
            Weights::new(0.0, 1.0, 0.0).unwrap(),
            scalar_pair(1.0, 0.0),
            exact_certificate(0.0, 0.5, 1.0 / 6.0, 1.0, 0.0),
            true,
        ));
        // Mirrored channel, weight on user 2: optimum (0, 1), M1 = MS = 1/6.
        tuples.push(certified(
            AlignedChannelSpec::scalar(2.0, 1.0, 1.0).unwrap(),
            Weights::new(0.0, 0.0, 1.0).unwrap(),
            scalar_pair(0.0, 1.0),
            exact_certificate(1.0 / 6.0, 0.0, 1.0 / 6.0, 0.0, 1.0),
            true,
        ));
        // Both confidential weights; user 2's branch sits exactly at zero
        // with its full weight still satisfying stationarity (M2 = 1).
        tuples.push(certified(
            AlignedChannelSpec::scalar(1.0, 2.0, 1.0).unwrap(),
            Weights::new(0.0, 1.0, 1.0).unwrap(),
            scalar_pair(1.0, 0.0),
            exact_certificate(0.0, 1.0, 1.0 / 6.0, 1.0, 1.0),
            true,
        ));

        let mimo = AlignedChannelSpec::new(
            PsdMatrix::from_rows(2, &[1.0, 0.2, 0.2, 1.5]).unwrap(),
            PsdMatrix::from_rows(2, &[2.0, -0.1, -0.1, 1.0]).unwrap(),
            PsdMatrix::from_rows(2, &[1.0, 0.3, 0.3, 2.0]).unwrap(),
        )
        .unwrap();
        let scalar = AlignedChannelSpec::scalar(1.0, 2.0, 1.5).unwrap();
        let fitted: [(&AlignedChannelSpec, (f64, f64, f64)); 4] = [
            (&mimo, (0.0, 0.25, 0.75)),
            (&mimo, (0.0, 0.5, 0.5)),
            (&mimo, (0.25, 0.5, 0.25)),
            (&scalar, (0.3, 0.3, 0.4)),
        ];
        for (i, (c, mu)) in fitted.iter().copied().enumerate() {
            let w = Weights::new(mu.0, mu.1, mu.2).unwrap();
            for order in [Order::Order12, Order::Order21] {
                let p =
                    maximize_weighted(&w, c, order, SOLVER_RESTARTS, 500 + i as u64).unwrap();
                let cert = fit_certificate(&p.pair, &w, c, order).unwrap();
                tuples.push(certified(c.clone(), w, p.pair, cert, false));
            }
        }
        (tuples, start.elapsed())
    })
}

/// Construct the enhancement when the certificate satisfies the converse
/// construction's hypotheses: positive confidential weight and both branch
/// weights at their full values.
fn enhancement_for(t: &Certified) -> Option<Enhancement> {
    if t.w.mu1 + t.w.mu2 == 0.0 || !full_weight(t.cert.nu1, t.w.mu1)
        || !full_weight(t.cert.nu2, t.w.mu2)
    {
        return None;
    }
    Some(construct_enhanced(&t.pair, &t.cert, &t.w, &t.c).unwrap())
}

#[test]
fn c01_achievability_closed_forms() {
    let start = Instant::now();
    let mut rng = rng_from_seed(101);
    let mut worst = 0.0f64;
    for i in 0..ACHIEVABILITY_SCHEMES {
        let t = 1 + i % 3;
        let c: ChannelSpec = if i % 2 == 0 {
            random_aligned_channel(&mut rng, t).to_channel()
        } else {
            let r1 = 1 + (i / 2) % 3;
            let r2 = 1 + (i / 5) % 3;
            random_general_channel(&mut rng, t, r1, r2)
        };
        // Keep every layer a few percent away from singular: the
        // determinant-ratio mutual-information evaluation loses the 1e-9
        // target within ~1e-7 of a singular layer, and the identities under
        // check are polynomial in the covariances, so interior schemes give
        // complete coverage.
        let raw = random_feasible_pair(&mut rng, &c.s, (0.0, 1.0));
        let floor = c.s.sym() * 0.025;
        let pair = CovariancePair::new(
            PsdMatrix::new(&(raw.k1.sym() * 0.9) + &floor).unwrap(),
            PsdMatrix::new(&(raw.k2.sym() * 0.9) + &floor).unwrap(),
        )
        .unwrap();
        let order = if i % 4 < 2 { Order::Order12 } else { Order::Order21 };
        let scheme = AuxiliaryScheme::for_pair(&pair, &c, order).unwrap();
        let report = achievability_check(&scheme, &c).unwrap();
        assert!(
            report.max_abs_gap <= ACHIEVABILITY_TOL,
            "scheme {i}: mutual-information rates differ from closed forms by {}",
            report.max_abs_gap
        );
        worst = worst.max(report.max_abs_gap);
    }
    let elapsed = start.elapsed();
    assert!(elapsed <= ACHIEVABILITY_BUDGET, "achievability sweep took {elapsed:?}");
    println!(
        "criterion 1: PASS — worst closed-form gap {worst:.3e} over {ACHIEVABILITY_SCHEMES} \
         schemes in {elapsed:?}"
    );
}

#[test]
fn c02_order_invariance() {
    let set = solved_set();
    assert!(
        set.worst_scalar_gap <= SCALAR_ORDER_GAP_TOL,
        "worst scalar order gap {}",
        set.worst_scalar_gap
    );
    assert!(
        set.worst_aligned_gap <= ALIGNED_ORDER_GAP_TOL,
        "worst aligned order gap {}",
        set.worst_aligned_gap
    );
    assert!(
        set.worst_above_oracle <= ORACLE_TOL,
        "solver exceeds scalar oracle by {}",
        set.worst_above_oracle
    );
    assert!(set.elapsed <= ORDER_BUDGET, "solving pass took {:?}", set.elapsed);
    println!(
        "criterion 2: PASS — order gaps {:.3e} (scalar, {} channels) / {:.3e} (aligned, {} \
         channels), oracle excess {:.3e}, in {:?}",
        set.worst_scalar_gap,
        SCALAR_CHANNELS,
        set.worst_aligned_gap,
        ALIGNED_CHANNELS,
        set.worst_above_oracle,
        set.elapsed
    );
}

#[test]
fn c03_solver_matches_scalar_oracle() {
    let start = Instant::now();
    let grid = GridSpec::new(ORACLE_RESOLUTION).unwrap();
    let weights = simplex_weights(0.1).unwrap();
    let mut worst = 0.0f64;
    for (ci, c) in [
        AlignedChannelSpec::scalar(1.0, 2.0, 1.0).unwrap(),
        AlignedChannelSpec::scalar(0.7, 1.9, 2.0).unwrap(),
    ]
    .iter()
    .enumerate()
    {
        for order in [Order::Order12, Order::Order21] {
            let pts = scalar_boundary(c, &grid, order).unwrap();
            for (wi, w) in weights.iter().enumerate() {
                let seed = (ci * weights.len() + wi) as u64;
                let p = maximize_weighted(w, c, order, SOLVER_RESTARTS, seed).unwrap();
                let oracle = weighted_max(&pts, w.mu0, w.mu1, w.mu2)
                    .unwrap()
                    .rates
                    .weighted(w.mu0, w.mu1, w.mu2);
                let delta = (p.objective - oracle).abs();
                assert!(
                    delta <= ORACLE_TOL,
                    "channel {ci} order {} weight ({}, {}, {}): |solver - oracle| = {delta}",
                    order.label(),
                    w.mu0,
                    w.mu1,
                    w.mu2
                );
                worst = worst.max(delta);
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed <= ORACLE_BUDGET, "oracle comparison took {elapsed:?}");
    println!(
        "criterion 3: PASS — worst |solver - oracle| {worst:.3e} over {} weights x 2 channels \
         x 2 orders in {elapsed:?}",
        weights.len()
    );
}

#[test]
fn c04_kkt_certificates() {
    let set = solved_set();
    let certs = certificates();
    let mut worst_stat = 0.0f64;
    let mut worst_slack = 0.0f64;
    for (s, cert) in set.solved.iter().zip(certs) {
        assert!(
            cert.residual_stationarity <= STATIONARITY_TOL,
            "weight ({}, {}, {}) order {} t={}: stationarity residual {}",
            s.w.mu0,
            s.w.mu1,
            s.w.mu2,
            s.order.label(),
            s.c.t(),
            cert.residual_stationarity
        );
        assert!(
            cert.residual_slackness <= SLACKNESS_REL_TOL * cert.slackness_scale,
            "weight ({}, {}, {}) order {}: slackness {} at scale {}",
            s.w.mu0,
            s.w.mu1,
            s.w.mu2,
            s.order.label(),
            cert.residual_slackness,
            cert.slackness_scale
        );
        worst_stat = worst_stat.max(cert.residual_stationarity);
        worst_slack = worst_slack.max(cert.residual_slackness / cert.slackness_scale);
    }
    println!(
        "criterion 4: PASS — worst stationarity {worst_stat:.3e}, worst relative slackness \
         {worst_slack:.3e} over {} certificates",
        certs.len()
    );
}

#[test]
fn c05_enhancement_identities() {
    let (tuples, elapsed) = certified_tuples();
    let mut worst_hand = 0.0f64;
    let mut worst_fitted_ratio = 0.0f64;
    for (i, t) in tuples.iter().enumerate() {
        let enh = enhancement_for(t)
            .unwrap_or_else(|| panic!("tuple {i} must satisfy the construction hypotheses"));
        let res = enh.verify().unwrap();
        if t.hand_solved {
            assert!(
                res.max() <= HAND_RESIDUAL_TOL,
                "hand-solved tuple {i}: enhancement residuals {res:?}"
            );
            worst_hand = worst_hand.max(res.max());
        } else {
            let bound = FITTED_RESIDUAL_FACTOR * t.cert.residual_stationarity;
            assert!(
                res.max() <= bound,
                "fitted tuple {i}: residuals {res:?} exceed {bound:.3e} \
                 (certificate residual {:.3e})",
                t.cert.residual_stationarity
            );
            worst_fitted_ratio =
                worst_fitted_ratio.max(res.max() / t.cert.residual_stationarity.max(1e-300));
        }
    }
    assert!(*elapsed <= ENHANCE_BUDGET, "enhancement set took {elapsed:?}");
    println!(
        "criterion 5: PASS — hand-solved residuals <= {worst_hand:.3e}, fitted residual ratio \
         <= {worst_fitted_ratio:.3}x over {} tuples in {elapsed:?}",
        tuples.len()
    );
}

#[test]
fn c06_converse_chain() {
    let (tuples, _) = certified_tuples();
    let set = solved_set();
    let certs = certificates();
    let mut worst_gap = 0.0f64;
    let mut checked = 0usize;
    let mut check = |enh: &Enhancement, objective: f64, residual: f64, label: &str| {
        let converse = enh.converse_value().unwrap();
        let tol = CONVERSE_FLOOR.max(10.0 * residual);
        let gap = (converse - objective).abs();
        assert!(gap <= tol, "{label}: |converse - objective| = {gap:.3e} > {tol:.3e}");
        worst_gap = worst_gap.max(gap);
        checked += 1;
    };
    for (i, t) in tuples.iter().enumerate() {
        let enh = enhancement_for(t).unwrap();
        check(&enh, t.objective, t.cert.residual_stationarity, &format!("tuple {i}"));
    }
    // Solver outputs whose certificates carry full branch weights; points
    // where a confidential branch is clamped below its weight certify a
    // different (clamped) objective and have no enhancement counterpart.
    for (i, (s, cert)) in set.solved.iter().zip(certs).enumerate() {
        if !full_weight(cert.nu1, s.w.mu1) || !full_weight(cert.nu2, s.w.mu2) {
            continue;
        }
        let enh = construct_enhanced(&s.point.pair, cert, &s.w, &s.c).unwrap();
        check(
            &enh,
            s.point.objective,
            cert.residual_stationarity,
            &format!("solved point {i}"),
        );
    }
    println!(
        "criterion 6: PASS — worst |converse - objective| {worst_gap:.3e} over {checked} \
         certified points ({} solver outputs eligible of {})",
        checked - tuples.len(),
        set.solved.len()
    );
}

#[test]
fn c07_extremal_inequality() {
    let (tuples, _) = certified_tuples();
    let set = solved_set();
    let certs = certificates();
    let mut rng = rng_from_seed(707);
    let mut worst_min = f64::INFINITY;
    let mut tuples_checked = 0usize;
    let mut check = |enh: &Enhancement, pair: &CovariancePair, s: &PsdMatrix,
                     rng: &mut ChaCha8Rng| {
        let at_top = enh
            .extremal_gap(&PsdMatrix::new(pair.sum()).unwrap())
            .unwrap();
        assert!(
            at_top.abs() <= EXTREMAL_EQUALITY_TOL,
            "gap at the certified total covariance is {at_top:.3e}"
        );
        for _ in 0..EXTREMAL_DRAWS {
            let q = PsdMatrix::new(random_feasible_pair(rng, s, (0.0, 1.0)).sum()).unwrap();
            let gap = enh.extremal_gap(&q).unwrap();
            assert!(gap >= EXTREMAL_FLOOR, "extremal gap {gap:.3e} at a random auxiliary");
            worst_min = worst_min.min(gap);
        }
        tuples_checked += 1;
    };
    for t in tuples {
        let enh = enhancement_for(t).unwrap();
        check(&enh, &t.pair, &t.c.s, &mut rng);
    }
    for (s, cert) in set.solved.iter().zip(certs) {
        if !full_weight(cert.nu1, s.w.mu1) || !full_weight(cert.nu2, s.w.mu2) {
            continue;
        }
        let enh = construct_enhanced(&s.point.pair, cert, &s.w, &s.c).unwrap();
        check(&enh, &s.point.pair, &s.c.s, &mut rng);
    }
    println!(
        "criterion 7: PASS — extremal gap >= {worst_min:.3e} over {EXTREMAL_DRAWS} draws x \
         {tuples_checked} certified tuples, equality at the certified covariance"
    );
}

#[test]
fn c08_general_reduction() {
    let mut rng = rng_from_seed(808);
    let mut worst_leak = 0.0f64;
    for i in 0..LEAKAGE_SPECS {
        let t = 1 + i % 3;
        let ch = random_general_channel(&mut rng, t, t, t);
        let tight = leakage_gap(&ch, REDUCTION_ALPHA).unwrap();
        assert!(tight <= LEAKAGE_TOL, "spec {i}: leakage bound {tight:.3e} at alpha 1e-6");
        worst_leak = worst_leak.max(tight);
        let mut prev = f64::INFINITY;
        for alpha in ALPHA_GRID {
            let gap = leakage_gap(&ch, alpha).unwrap();
            assert!(
                gap <= prev + 1e-12,
                "spec {i}: leakage bound rose from {prev:.3e} to {gap:.3e} at alpha {alpha:e}"
            );
            prev = gap;
        }
    }
    let reduction_weights = [
        (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
        (0.2, 0.5, 0.3),
        (0.5, 0.2, 0.3),
        (0.0, 0.5, 0.5),
        (0.4, 0.6, 0.0),
        (0.25, 0.25, 0.5),
    ];
    let grid = GridSpec::new(ORACLE_RESOLUTION).unwrap();
    let mut worst_delta = 0.0f64;
    for (j, mu) in reduction_weights.iter().enumerate() {
        let ch = random_general_channel(&mut rng, 1, 1, 1);
        let w = Weights::new(mu.0, mu.1, mu.2).unwrap();
        let order = if j % 2 == 0 { Order::Order12 } else { Order::Order21 };
        let sol =
            solve_general(&ch, &w, order, SOLVER_RESTARTS, 900 + j as u64, REDUCTION_ALPHA)
                .unwrap();
        let pts = scalar_general_boundary(&ch, &grid, order).unwrap();
        let oracle = weighted_max(&pts, w.mu0, w.mu1, w.mu2)
            .unwrap()
            .rates
            .weighted(w.mu0, w.mu1, w.mu2);
        let delta = (sol.point.objective - oracle).abs();
        assert!(
            delta <= REDUCTION_TOL,
            "reduction case {j}: |aligned solve - direct oracle| = {delta:.3e}"
        );
        worst_delta = worst_delta.max(delta);
    }
    println!(
        "criterion 8: PASS — leakage bound <= {worst_leak:.3e} at alpha 1e-6 over \
         {LEAKAGE_SPECS} square specs (monotone on the alpha grid), reduction within \
         {worst_delta:.3e} of the direct scalar oracle"
    );
}

#[test]
fn c09_ns_correspondence() {
    let grid = GridSpec::new(NS_RESOLUTION).unwrap();
    let channels = [
        AlignedChannelSpec::scalar(1.0, 2.0, 1.0).unwrap(),
        AlignedChannelSpec::scalar(2.0, 1.0, 1.5).unwrap(),
        AlignedChannelSpec::scalar(0.7, 1.9, 2.0).unwrap(),
    ];
    let weight_list = [
        (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
        (0.5, 0.25, 0.25),
        (0.2, 0.4, 0.4),
        (0.0, 0.5, 0.5),
        (0.6, 0.4, 0.0),
        (1.0, 0.0, 0.0),
    ];
    let mut worst_distance_cells = 0.0f64;
    let mut worst_order_gap = 0.0f64;
    for (ci, c) in channels.iter().enumerate() {
        for (wi, mu) in weight_list.iter().enumerate() {
            let w = Weights::new(mu.0, mu.1, mu.2).unwrap();
            for order in [Order::Order12, Order::Order21] {
                let seed = (ci * weight_list.len() + wi) as u64;
                let p = maximize_weighted(&w, c, order, SOLVER_RESTARTS, seed).unwrap();
                let cert = fit_certificate(&p.pair, &w, c, order).unwrap();
                let report =
                    ns_correspondence_check(c, &w, cert.lambda, &p.pair, order, &grid).unwrap();
                assert!(
                    report.distance_to_optimal <= report.grid_cell * (1.0 + 1e-9),
                    "channel {ci} weight {wi} order {}: optimizer sits {:.3e} from the \
                     non-secret optimum (cell {:.3e})",
                    order.label(),
                    report.distance_to_optimal,
                    report.grid_cell
                );
                assert!(
                    report.order_gap <= NS_ORDER_TOL,
                    "channel {ci} weight {wi}: non-secret maxima differ across orders by {:.3e}",
                    report.order_gap
                );
                let min_form_gap = (report.min_form_max_12 - report.min_form_max_21).abs();
                assert!(
                    min_form_gap <= NS_ORDER_TOL,
                    "channel {ci} weight {wi}: min-form maxima differ across orders by \
                     {min_form_gap:.3e}"
                );
                worst_distance_cells = worst_distance_cells
                    .max(report.distance_to_optimal / report.grid_cell);
                worst_order_gap = worst_order_gap.max(report.order_gap.max(min_form_gap));
            }
        }
    }
    println!(
        "criterion 9: PASS — optimizers within {worst_distance_cells:.3} grid cells of the \
         non-secret optima, order gaps <= {worst_order_gap:.3e}, {} channels x {} weights x 2 \
         orders at resolution {NS_RESOLUTION}",
        channels.len(),
        weight_list.len()
    );
}

#[test]
fn c10_deterministic_artifacts() {
    let bin = env!("CARGO_BIN_EXE_sdpc");
    let tmp = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
    let spec_dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .join("channels");
    let run = |args: &[&str], out: &std::path::Path| {
        let status = Command::new(bin)
            .args(args)
            .arg("--output")
            .arg(out)
            .status()
            .expect("CLI binary runs");
        assert!(status.success(), "{args:?} exited with {status}");
        std::fs::read(out).expect("artifact written")
    };
    let trace_spec = spec_dir.join("scalar_degraded.spec");
    let trace_args: Vec<String> = [
        "trace",
        trace_spec.to_str().unwrap(),
        "--seed",
        "9",
        "--restarts",
        "8",
        "--step",
        "0.2",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let trace_args: Vec<&str> = trace_args.iter().map(String::as_str).collect();
    let a = run(&trace_args, &tmp.join("trace_a.csv"));
    let b = run(&trace_args, &tmp.join("trace_b.csv"));
    assert_eq!(a, b, "trace CSV differs between identical-seed runs");
    assert!(!a.is_empty());

    let leak_spec = spec_dir.join("scalar_general.spec");
    let leak_args = ["leakage-sweep", leak_spec.to_str().unwrap()];
    let la = run(&leak_args, &tmp.join("leak_a.csv"));
    let lb = run(&leak_args, &tmp.join("leak_b.csv"));
    assert_eq!(la, lb, "leakage CSV differs between identical runs");
    println!(
        "criterion 10: PASS — byte-identical CSV artifacts across repeated runs ({} + {} bytes)",
        a.len(),
        la.len()
    );
}
