//! Outcome sampling, opinion reporting and the ground-truth oracle.

use rand::Rng;

use crate::risk_trust::{classify, Characteristics, ModelParams};
use crate::simulator::scenario::{BehaviorProfile, RecommenderProfile};
use crate::trust_metric::{degree_shift, OrdinalDegree, TrustTenths};

/// Draws below this count are not trusted as a population estimate.
pub const GROUND_TRUTH_DRAWS: usize = 100_000;

fn around<R: Rng + ?Sized>(center: TrustTenths, jitter: u8, rng: &mut R) -> TrustTenths {
    if jitter == 0 {
        return center;
    }
    let j = i64::from(jitter);
    center.offset(rng.gen_range(-j..=j))
}

/// One interaction outcome for an agent with `profile` in `round`.
pub fn sample_outcome<R: Rng + ?Sized>(profile: &BehaviorProfile, round: u32, rng: &mut R) -> TrustTenths {
    match *profile {
        BehaviorProfile::Consistent { center, jitter } => around(center, jitter, rng),
        BehaviorProfile::Erratic { center, jitter, spike_probability, spike_floor } => {
            if spike_probability > 0.0 && rng.gen_bool(spike_probability) {
                let hi = center.tenths().saturating_sub(1).max(spike_floor.tenths());
                TrustTenths::new(rng.gen_range(spike_floor.tenths()..=hi)).expect("within the scale")
            } else {
                around(center, jitter, rng)
            }
        }
        BehaviorProfile::Shifting { before, after, switch_round, jitter } => {
            let center = if round < switch_round { before } else { after };
            around(center, jitter, rng)
        }
    }
}

/// The profile an agent settles into: the post-switch behavior for shifting agents.
pub fn stationary(profile: &BehaviorProfile) -> BehaviorProfile {
    match *profile {
        BehaviorProfile::Shifting { after, jitter, .. } => BehaviorProfile::Consistent { center: after, jitter },
        ref other => other.clone(),
    }
}

/// What a recommender tells others, given its own opinion.
pub fn produce_recommendation(
    profile: RecommenderProfile,
    opinion_tenths: TrustTenths,
    opinion_degree: OrdinalDegree,
) -> (TrustTenths, OrdinalDegree) {
    match profile {
        RecommenderProfile::Honest => (opinion_tenths, opinion_degree),
        RecommenderProfile::Liar => (opinion_tenths.complement(), opinion_degree.inverted()),
        RecommenderProfile::Offset { shift } => (
            opinion_tenths.offset(i64::from(shift.value())),
            degree_shift(opinion_degree, shift),
        ),
    }
}

/// Population median and downside semi-deviation of a tenths histogram.
fn histogram_stats(hist: &[u64; 11]) -> (f64, f64) {
    let total: u64 = hist.iter().sum();
    let value_at = |rank: u64| {
        let mut seen = 0;
        for (tenths, &count) in hist.iter().enumerate() {
            seen += count;
            if seen > rank {
                return tenths as f64 / 10.0;
            }
        }
        unreachable!("rank below total")
    };
    let median = if total % 2 == 1 {
        value_at(total / 2)
    } else {
        (value_at(total / 2 - 1) + value_at(total / 2)) / 2.0
    };
    let mean = hist.iter().enumerate().map(|(t, &c)| t as f64 / 10.0 * c as f64).sum::<f64>() / total as f64;
    let (squares, below) = hist
        .iter()
        .enumerate()
        .map(|(t, &c)| (t as f64 / 10.0, c))
        .filter(|&(v, c)| c > 0 && v < mean)
        .fold((0.0, 0u64), |(sq, n), (v, c)| (sq + (v - mean).powi(2) * c as f64, n + c));
    let semi = if below == 0 { 0.0 } else { (squares / below as f64).sqrt() };
    (median, semi)
}

/// Monte Carlo classification of a profile's stationary distribution.
pub fn ground_truth_characteristics<R: Rng + ?Sized>(
    profile: &BehaviorProfile,
    params: &ModelParams,
    rng: &mut R,
) -> Characteristics {
    let steady = stationary(profile);
    let mut hist = [0u64; 11];
    for _ in 0..GROUND_TRUTH_DRAWS {
        hist[usize::from(sample_outcome(&steady, 0, rng).tenths())] += 1;
    }
    let (median, semi) = histogram_stats(&hist);
    classify(median, semi, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trust_metric::SemanticShift;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(v: u8) -> TrustTenths {
        TrustTenths::new(v).unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(99)
    }

    #[test]
    fn consistent_without_jitter_is_constant() {
        let p = BehaviorProfile::consistent(t(8), 0);
        let mut r = rng();
        assert!((0..100).all(|round| sample_outcome(&p, round, &mut r) == t(8)));
    }

    #[test]
    fn jitter_stays_in_band_and_clamps() {
        let p = BehaviorProfile::consistent(t(9), 2);
        let mut r = rng();
        let draws: Vec<_> = (0..2000).map(|i| sample_outcome(&p, i, &mut r).tenths()).collect();
        assert!(draws.iter().all(|&d| (7..=10).contains(&d)));
        for v in 7..=10 {
            assert!(draws.contains(&v), "{v} never drawn");
        }
    }

    #[test]
    fn shifting_switches_at_round() {
        let p = BehaviorProfile::Shifting { before: t(9), after: t(1), switch_round: 5, jitter: 0 };
        let mut r = rng();
        assert_eq!(sample_outcome(&p, 4, &mut r), t(9));
        assert_eq!(sample_outcome(&p, 5, &mut r), t(1));
        assert_eq!(sample_outcome(&p, 50, &mut r), t(1));
    }

    #[test]
    fn erratic_without_spikes_matches_consistent() {
        let erratic = BehaviorProfile::Erratic { center: t(7), jitter: 1, spike_probability: 0.0, spike_floor: t(1) };
        let consistent = BehaviorProfile::consistent(t(7), 1);
        let (mut a, mut b) = (rng(), rng());
        for round in 0..200 {
            assert_eq!(sample_outcome(&erratic, round, &mut a), sample_outcome(&consistent, round, &mut b));
        }
    }

    #[test]
    fn erratic_spikes_land_below_center() {
        let p = BehaviorProfile::Erratic { center: t(8), jitter: 0, spike_probability: 1.0, spike_floor: t(2) };
        let mut r = rng();
        let draws: Vec<_> = (0..500).map(|i| sample_outcome(&p, i, &mut r).tenths()).collect();
        assert!(draws.iter().all(|&d| (2..=7).contains(&d)));
    }

    #[test]
    fn recommendation_examples() {
        use OrdinalDegree::*;
        assert_eq!(produce_recommendation(RecommenderProfile::Honest, t(7), Good), (t(7), Good));
        assert_eq!(produce_recommendation(RecommenderProfile::Liar, t(8), VeryGood), (t(2), VeryBad));
        let plus_one = RecommenderProfile::Offset { shift: SemanticShift::new(1).unwrap() };
        assert_eq!(produce_recommendation(plus_one, t(5), Bad), (t(6), Good));
        assert_eq!(produce_recommendation(plus_one, t(10), VeryGood), (t(10), VeryGood));
    }

    #[test]
    fn histogram_stats_match_direct_computation() {
        let mut hist = [0u64; 11];
        for v in [8, 7, 8, 6, 7, 5, 2, 7] {
            hist[v] += 1;
        }
        let (median, semi) = histogram_stats(&hist);
        assert!((median - 0.7).abs() < 1e-12);
        assert!((semi - (0.196875f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ground_truth_examples() {
        let params = ModelParams::new(1.0, 4, 0.5, 0.3).unwrap();
        let g = |p: BehaviorProfile, params: &ModelParams| ground_truth_characteristics(&p, params, &mut rng());
        assert_eq!(
            g(BehaviorProfile::consistent(t(8), 0), &params),
            Characteristics { trustworthy: true, risky: false }
        );
        assert_eq!(
            g(BehaviorProfile::consistent(t(2), 0), &params),
            Characteristics { trustworthy: false, risky: false }
        );
        let tight = ModelParams::new(1.0, 4, 0.5, 0.1).unwrap();
        let erratic = BehaviorProfile::Erratic { center: t(8), jitter: 0, spike_probability: 0.3, spike_floor: t(0) };
        assert!(g(erratic, &tight).risky);
        let shifting = BehaviorProfile::Shifting { before: t(9), after: t(1), switch_round: 3, jitter: 0 };
        assert!(!g(shifting, &params).trustworthy);
    }
}
