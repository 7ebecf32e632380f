//! Median/semi-deviation trust with forgiveness.
//!
//! Outcomes of interactions with a peer land in an [`ExperienceWindow`]. When
//! the window fills, the period closes: the window median is blended into the
//! general trust degree with forgiveness weight `k`, the downside
//! semi-deviation of the window becomes the risk value, the window is cleared
//! and its capacity grows by one, up to `n`.
//!
//! A peer met for the first time starts from the median of recommendations
//! (or the trust threshold when there are none) and a risk value equal to the
//! risk threshold. Classification compares both values against thresholds
//! with `>=`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::Json;
use crate::trust_metric::TrustTenths;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiskError {
    #[error("experience set is empty")]
    EmptyWindow,
    #[error("no reputation values available")]
    NoReputation,
    #[error("invalid model parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },
}

/// Forgiveness weight, window cap and the two thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub k: f64,
    pub n: usize,
    pub td_th: f64,
    pub rv_th: f64,
}

impl ModelParams {
    pub fn new(k: f64, n: usize, td_th: f64, rv_th: f64) -> Result<Self, RiskError> {
        let params = ModelParams { k, n, td_th, rv_th };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), RiskError> {
        let invalid = |field, reason: &str| Err(RiskError::InvalidParams { field, reason: reason.to_string() });
        if !(self.k.is_finite() && self.k > 0.0) {
            return invalid("k", "must be a finite value > 0");
        }
        if self.n < 1 {
            return invalid("n", "must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.td_th) {
            return invalid("td_th", "must lie in [0, 1]");
        }
        if !(self.rv_th.is_finite() && self.rv_th >= 0.0) {
            return invalid("rv_th", "must be a finite value >= 0");
        }
        Ok(())
    }

    /// Window capacity during period `m` (0-based).
    pub fn capacity_for(&self, period_index: u64) -> usize {
        usize::try_from(period_index.saturating_add(1)).map_or(self.n, |c| c.min(self.n))
    }
}

/// The current interaction period's outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperienceWindow {
    values: Vec<TrustTenths>,
    capacity: usize,
    period_index: u64,
}

impl ExperienceWindow {
    pub fn new(period_index: u64, params: &ModelParams) -> Self {
        let capacity = params.capacity_for(period_index);
        ExperienceWindow { values: Vec::with_capacity(capacity), capacity, period_index }
    }

    pub fn values(&self) -> &[TrustTenths] {
        &self.values
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn period_index(&self) -> u64 {
        self.period_index
    }

    pub fn is_full(&self) -> bool {
        self.values.len() >= self.capacity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Characteristics {
    pub trustworthy: bool,
    pub risky: bool,
}

/// Recommendation values received about a peer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReputationSample {
    pub values: Vec<TrustTenths>,
}

impl ReputationSample {
    pub fn new(values: Vec<TrustTenths>) -> Self {
        ReputationSample { values }
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl From<Vec<TrustTenths>> for ReputationSample {
    fn from(values: Vec<TrustTenths>) -> Self {
        ReputationSample { values }
    }
}

/// Per-peer state held by an observer.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustState {
    window: ExperienceWindow,
    td_gen: Option<f64>,
    rv: Option<f64>,
    has_completed_period: bool,
}

impl TrustState {
    /// A state with no trust estimate yet. Prefer [`bootstrap`] for a first contact.
    pub fn empty(params: &ModelParams) -> Self {
        TrustState {
            window: ExperienceWindow::new(0, params),
            td_gen: None,
            rv: None,
            has_completed_period: false,
        }
    }

    /// A state resumed at period `period_index` with given running values.
    pub fn resume(td_gen: f64, rv: f64, period_index: u64, params: &ModelParams) -> Self {
        TrustState {
            window: ExperienceWindow::new(period_index, params),
            td_gen: Some(td_gen.clamp(0.0, 1.0)),
            rv: Some(rv.max(0.0)),
            has_completed_period: period_index > 0,
        }
    }

    pub fn window(&self) -> &ExperienceWindow {
        &self.window
    }

    pub fn td_gen(&self) -> Option<f64> {
        self.td_gen
    }

    pub fn rv(&self) -> Option<f64> {
        self.rv
    }

    pub fn has_completed_period(&self) -> bool {
        self.has_completed_period
    }

    /// Appends an outcome; returns `true` if it closed the period.
    pub fn push_experience(&mut self, td: TrustTenths, params: &ModelParams) -> bool {
        self.window.values.push(td);
        if !self.window.is_full() {
            return false;
        }
        self.close_period(params);
        true
    }

    fn close_period(&mut self, params: &ModelParams) {
        let values = &self.window.values;
        let ex_med = median_of_window(values).expect("closing window is non-empty");
        let rv = risk_value(values).expect("closing window is non-empty");
        // With no previous estimate the period median stands on its own.
        let td_gen = match self.td_gen {
            Some(prev) => update_general_trust(prev, ex_med, params.k),
            None => ex_med,
        };
        self.td_gen = Some(td_gen);
        self.rv = Some(rv);
        self.has_completed_period = true;
        self.window = ExperienceWindow::new(self.window.period_index + 1, params);
    }

    /// Keys `capacity`, `period_index`, `rv`, `td_gen`, `window` (decimal strings).
    pub fn to_json(&self) -> Json {
        Json::object([
            ("td_gen", Json::opt_real(self.td_gen)),
            ("rv", Json::opt_real(self.rv)),
            ("window", Json::Array(self.window.values.iter().map(Json::str).collect())),
            ("period_index", Json::Int(self.window.period_index as i64)),
            ("capacity", Json::Int(self.window.capacity as i64)),
        ])
    }
}

/// Median of the window: middle element, or mean of the two middle elements.
pub fn median_of_window(values: &[TrustTenths]) -> Result<f64, RiskError> {
    if values.is_empty() {
        return Err(RiskError::EmptyWindow);
    }
    let mut sorted: Vec<u8> = values.iter().map(|v| v.tenths()).collect();
    sorted.sort_unstable();
    let mid = sorted.len() / 2;
    let twice_tenths = if sorted.len() % 2 == 1 {
        2 * u32::from(sorted[mid])
    } else {
        u32::from(sorted[mid - 1]) + u32::from(sorted[mid])
    };
    Ok(f64::from(twice_tenths) / 20.0)
}

/// `(prev + k * ex_med) / (k + 1)`.
pub fn update_general_trust(prev: f64, ex_med: f64, k: f64) -> f64 {
    debug_assert!(k > 0.0, "forgiveness weight must be positive");
    ((prev + k * ex_med) / (k + 1.0)).clamp(0.0, 1.0)
}

/// Downside semi-deviation: RMS deviation of the values strictly below the
/// mean, normalised by how many there are. Zero when nothing is below the mean.
pub fn risk_value(values: &[TrustTenths]) -> Result<f64, RiskError> {
    if values.is_empty() {
        return Err(RiskError::EmptyWindow);
    }
    // Exact in integers: with L values summing to S tenths, a value t is below the
    // mean iff L*t < S, and its deviation is (L*t - S) / (10*L).
    let len = values.len() as i128;
    let sum: i128 = values.iter().map(|v| i128::from(v.tenths())).sum();
    let (squares, below) = values
        .iter()
        .map(|v| len * i128::from(v.tenths()) - sum)
        .filter(|&d| d < 0)
        .fold((0i128, 0i128), |(sq, n), d| (sq + d * d, n + 1));
    if below == 0 {
        return Ok(0.0);
    }
    Ok(((squares as f64) / (below as f64)).sqrt() / (10.0 * len as f64))
}

/// Median of the recommendation values.
pub fn general_reputation(recs: &ReputationSample) -> Result<f64, RiskError> {
    median_of_window(&recs.values).map_err(|_| RiskError::NoReputation)
}

/// Initial state for a peer met for the first time.
pub fn bootstrap(recs: Option<&ReputationSample>, params: &ModelParams) -> TrustState {
    let td_gen = recs
        .and_then(|r| general_reputation(r).ok())
        .unwrap_or(params.td_th);
    TrustState {
        window: ExperienceWindow::new(0, params),
        td_gen: Some(td_gen),
        rv: Some(params.rv_th),
        has_completed_period: false,
    }
}

pub fn classify(td_gen: f64, rv: f64, params: &ModelParams) -> Characteristics {
    Characteristics { trustworthy: td_gen >= params.td_th, risky: rv >= params.rv_th }
}

/// Classifies using the last completed period's values, or the bootstrap
/// values before any period has closed.
pub fn evaluate(state: &TrustState, params: &ModelParams) -> Characteristics {
    classify(
        state.td_gen.unwrap_or(params.td_th),
        state.rv.unwrap_or(params.rv_th),
        params,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tt(values: &[f64]) -> Vec<TrustTenths> {
        values.iter().map(|&v| TrustTenths::from_f64(v).unwrap()).collect()
    }

    fn params(k: f64, n: usize) -> ModelParams {
        ModelParams::new(k, n, 0.5, 0.3).unwrap()
    }

    const WORKED_WINDOW: [f64; 8] = [0.8, 0.7, 0.8, 0.6, 0.7, 0.5, 0.2, 0.7];

    #[test]
    fn params_validation_names_field() {
        let bad = [
            (ModelParams { k: 0.0, n: 1, td_th: 0.5, rv_th: 0.1 }, "k"),
            (ModelParams { k: f64::NAN, n: 1, td_th: 0.5, rv_th: 0.1 }, "k"),
            (ModelParams { k: 1.0, n: 0, td_th: 0.5, rv_th: 0.1 }, "n"),
            (ModelParams { k: 1.0, n: 1, td_th: 1.5, rv_th: 0.1 }, "td_th"),
            (ModelParams { k: 1.0, n: 1, td_th: 0.5, rv_th: -0.1 }, "rv_th"),
        ];
        for (p, name) in bad {
            match p.validate() {
                Err(RiskError::InvalidParams { field, .. }) => assert_eq!(field, name),
                other => panic!("expected invalid {name}, got {other:?}"),
            }
        }
    }

    #[test]
    fn capacity_grows_to_cap() {
        let p = params(1.0, 3);
        let caps: Vec<_> = (0..6).map(|m| p.capacity_for(m)).collect();
        assert_eq!(caps, vec![1, 2, 3, 3, 3, 3]);
        assert_eq!(p.capacity_for(u64::MAX), 3);
    }

    #[test]
    fn push_examples() {
        let p = params(1.0, 4);
        let mut s = bootstrap(None, &p);
        assert_eq!(s.window().capacity(), 1);
        assert!(s.push_experience(TrustTenths::new(8).unwrap(), &p));
        assert_eq!(s.window().capacity(), 2);

        assert!(!s.push_experience(TrustTenths::new(8).unwrap(), &p));
        assert!(s.push_experience(TrustTenths::new(7).unwrap(), &p));
        assert_eq!(s.window().period_index(), 2);
        assert!(s.window().values().is_empty());

        let mut s = TrustState::resume(0.5, 0.3, 2, &p);
        assert_eq!(s.window().capacity(), 3);
        assert!(!s.push_experience(TrustTenths::new(5).unwrap(), &p));
        assert_eq!(s.window().values(), &tt(&[0.5])[..]);
    }

    #[test]
    fn period_sizes_follow_growth() {
        let p = params(1.0, 3);
        let mut s = bootstrap(None, &p);
        let closes: Vec<usize> = (1..=12)
            .filter(|_| s.push_experience(TrustTenths::new(6).unwrap(), &p))
            .collect();
        // closes after interactions 1, 3, 6, 9, 12
        assert_eq!(closes.len(), 5);
    }

    #[test]
    fn median_examples() {
        assert_eq!(median_of_window(&tt(&WORKED_WINDOW)).unwrap(), 0.7);
        assert_eq!(median_of_window(&tt(&[0.5])).unwrap(), 0.5);
        assert_eq!(median_of_window(&tt(&[0.2, 0.2, 0.9])).unwrap(), 0.2);
        assert_eq!(median_of_window(&tt(&[0.1, 0.4])).unwrap(), 0.25);
        assert_eq!(median_of_window(&[]), Err(RiskError::EmptyWindow));
    }

    #[test]
    fn update_examples() {
        assert!((update_general_trust(0.5, 0.7, 1.0) - 0.6).abs() < 1e-12);
        assert!((update_general_trust(0.5, 0.7, 3.0) - 0.65).abs() < 1e-12);
        for k in [0.1, 1.0, 7.5] {
            assert!((update_general_trust(0.3, 0.3, k) - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn risk_examples() {
        let table = risk_value(&tt(&WORKED_WINDOW)).unwrap();
        assert!((table - (0.196875f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(risk_value(&tt(&[0.4, 0.4, 0.4])).unwrap(), 0.0);
        assert!((risk_value(&tt(&[0.0, 1.0])).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(risk_value(&[]), Err(RiskError::EmptyWindow));
        // upside does not count
        assert_eq!(risk_value(&tt(&[0.5, 0.5, 0.5, 1.0])).unwrap(), (0.125f64 * 0.125 * 3.0 / 3.0).sqrt());
    }

    #[test]
    fn reputation_examples() {
        let r = |v: &[f64]| general_reputation(&ReputationSample::new(tt(v)));
        assert_eq!(r(&[0.3]).unwrap(), 0.3);
        assert_eq!(r(&[0.2, 0.8, 0.6]).unwrap(), 0.6);
        assert_eq!(r(&[0.1, 0.9]).unwrap(), 0.5);
        assert_eq!(r(&[]), Err(RiskError::NoReputation));
    }

    #[test]
    fn bootstrap_examples() {
        let p = params(1.0, 4);
        let s = bootstrap(Some(&ReputationSample::new(tt(&[0.8, 0.6, 0.9]))), &p);
        assert_eq!((s.td_gen(), s.rv()), (Some(0.8), Some(0.3)));
        let s = bootstrap(None, &p);
        assert_eq!((s.td_gen(), s.rv()), (Some(0.5), Some(0.3)));
        assert!(!s.has_completed_period());
        assert_eq!(s.window().period_index(), 0);
        let s = bootstrap(Some(&ReputationSample::new(tt(&[0.0]))), &p);
        assert_eq!(s.td_gen(), Some(0.0));
        // an empty sample falls back like an absent one
        let s = bootstrap(Some(&ReputationSample::default()), &p);
        assert_eq!(s.td_gen(), Some(0.5));
    }

    #[test]
    fn classify_examples() {
        let p = params(1.0, 1);
        assert_eq!(classify(0.7, 0.1, &p), Characteristics { trustworthy: true, risky: false });
        assert_eq!(classify(0.5, 0.3, &p), Characteristics { trustworthy: true, risky: true });
        assert_eq!(classify(0.2, 0.0, &p), Characteristics { trustworthy: false, risky: false });
        assert_eq!(classify(0.2, 0.9, &p), Characteristics { trustworthy: false, risky: true });
    }

    #[test]
    fn evaluate_examples() {
        let p = params(1.0, 1);
        let fresh = bootstrap(None, &p);
        assert_eq!(evaluate(&fresh, &p), Characteristics { trustworthy: true, risky: true });

        let mut s = bootstrap(None, &p);
        s.push_experience(TrustTenths::ONE, &p);
        assert!((s.td_gen().unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(s.rv(), Some(0.0));
        assert_eq!(evaluate(&s, &p), classify(0.75, 0.0, &p));

        let p2 = params(1.0, 2);
        let mut s = TrustState::resume(0.4, 0.3, 1, &p2);
        s.push_experience(TrustTenths::new(4).unwrap(), &p2);
        s.push_experience(TrustTenths::new(4).unwrap(), &p2);
        assert!((s.td_gen().unwrap() - 0.4).abs() < 1e-12);
        assert_eq!(s.rv(), Some(0.0));
    }

    #[test]
    fn mid_period_evaluation_reuses_last_close() {
        let p = params(1.0, 3);
        let mut s = TrustState::resume(0.9, 0.0, 2, &p);
        s.push_experience(TrustTenths::ZERO, &p);
        assert_eq!(s.td_gen(), Some(0.9));
        assert_eq!(evaluate(&s, &p), Characteristics { trustworthy: true, risky: false });
    }

    #[test]
    fn unbootstrapped_state_takes_first_median() {
        let p = params(2.0, 2);
        let mut s = TrustState::empty(&p);
        assert_eq!(evaluate(&s, &p), Characteristics { trustworthy: true, risky: true });
        s.push_experience(TrustTenths::new(3).unwrap(), &p);
        assert_eq!(s.td_gen(), Some(0.3));
    }

    #[test]
    fn json_shape() {
        let p = params(1.0, 8);
        let mut s = TrustState::resume(0.5, 0.3, 7, &p);
        s.push_experience(TrustTenths::new(8).unwrap(), &p);
        assert_eq!(
            s.to_json().to_string(),
            r#"{"capacity":8,"period_index":7,"rv":0.300000,"td_gen":0.500000,"window":["0.8"]}"#
        );
    }
}
