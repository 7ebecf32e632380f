//! Ordinal recommendation-based trust.
//!
//! Each agent keeps two stores keyed by `(context, agent)`:
//!
//! - a [`DirectTrustStore`] of experience counters `(s_vg, s_g, s_b, s_vb)`,
//!   whose argmax is the direct trust degree;
//! - a [`RecommenderStore`] of adjustment histories, one multiset of
//!   [`SemanticShift`]s per recommended degree. The mode of all absolute
//!   shifts is the recommender trust degree (mapped to a weight), and the
//!   mode of a single multiset is the correction applied to future
//!   recommendations of that degree.
//!
//! Ties are resolved deterministically: argmax ties go to the lowest-ranked
//! degree, recommender-trust mode ties go to the largest distance, and
//! semantic-distance mode ties go to the smallest correction (negative first).

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::trust_metric::{degree_distance, degree_shift, OrdinalDegree, SemanticShift};
use crate::{AgentId, Context};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArhError {
    #[error("no recorded experience")]
    NoExperience,
    #[error("recommender has no adjustment history")]
    UnknownRecommender,
    #[error("no recommendation carries a positive weight")]
    NoUsableRecommendations,
    #[error("duplicate recommender seed for context `{context}`, agent `{agent}`")]
    DuplicateSeed { context: Context, agent: AgentId },
}

/// Interaction tallies per outcome degree.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ExperienceCounters {
    // indexed by rank: [vb, b, g, vg]
    counts: [u64; 4],
}

impl ExperienceCounters {
    /// Builds counters from the conventional `(s_vg, s_g, s_b, s_vb)` order.
    pub fn from_tuple(vg: u64, g: u64, b: u64, vb: u64) -> Self {
        ExperienceCounters { counts: [vb, b, g, vg] }
    }

    /// `(s_vg, s_g, s_b, s_vb)`.
    pub fn as_tuple(&self) -> (u64, u64, u64, u64) {
        let [vb, b, g, vg] = self.counts;
        (vg, g, b, vb)
    }

    pub fn count(&self, degree: OrdinalDegree) -> u64 {
        self.counts[usize::from(degree.rank())]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn increment(&mut self, outcome: OrdinalDegree) {
        self.counts[usize::from(outcome.rank())] += 1;
    }
}

impl fmt::Display for ExperienceCounters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (vg, g, b, vb) = self.as_tuple();
        write!(f, "({vg},{g},{b},{vb})")
    }
}

/// Direct trust degree: the outcome with the highest tally, lowest rank on ties.
pub fn direct_trust_degree(counters: &ExperienceCounters) -> Result<OrdinalDegree, ArhError> {
    if counters.total() == 0 {
        return Err(ArhError::NoExperience);
    }
    // Ascending rank scan with strict `>` keeps the lowest-ranked tied degree.
    let mut best = OrdinalDegree::VeryBad;
    for degree in OrdinalDegree::ALL {
        if counters.count(degree) > counters.count(best) {
            best = degree;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DirectTrustStore {
    entries: BTreeMap<(Context, AgentId), ExperienceCounters>,
}

impl DirectTrustStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_experience(&mut self, context: &Context, agent: &AgentId, outcome: OrdinalDegree) {
        self.entries
            .entry((context.clone(), agent.clone()))
            .or_default()
            .increment(outcome);
    }

    pub fn counters(&self, context: &Context, agent: &AgentId) -> Option<&ExperienceCounters> {
        self.entries.get(&(context.clone(), agent.clone()))
    }

    /// Direct trust degree for a key, `NoExperience` if the key was never seen.
    pub fn degree(&self, context: &Context, agent: &AgentId) -> Result<OrdinalDegree, ArhError> {
        self.counters(context, agent)
            .ok_or(ArhError::NoExperience)
            .and_then(direct_trust_degree)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `context<TAB>agent<TAB>(s_vg,s_g,s_b,s_vb)`, one line per entry in key order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for ((context, agent), counters) in &self.entries {
            let _ = writeln!(out, "{context}\t{agent}\t{counters}");
        }
        out
    }
}

/// Adjustment history for one recommender: a multiset of shifts per recommended degree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdjustmentSets {
    // indexed by rank of the recommended degree: [T_vb, T_b, T_g, T_vg]
    per_degree: [Vec<SemanticShift>; 4],
}

impl AdjustmentSets {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds sets from the conventional `(T_vg, T_g, T_b, T_vb)` order.
    pub fn from_sets(
        vg: Vec<SemanticShift>,
        g: Vec<SemanticShift>,
        b: Vec<SemanticShift>,
        vb: Vec<SemanticShift>,
    ) -> Self {
        AdjustmentSets { per_degree: [vb, b, g, vg] }
    }

    pub fn push(&mut self, recommended: OrdinalDegree, shift: SemanticShift) {
        self.per_degree[usize::from(recommended.rank())].push(shift);
    }

    pub fn set(&self, recommended: OrdinalDegree) -> &[SemanticShift] {
        &self.per_degree[usize::from(recommended.rank())]
    }

    /// Every shift across all four sets.
    pub fn union(&self) -> impl Iterator<Item = SemanticShift> + '_ {
        self.per_degree.iter().flatten().copied()
    }

    pub fn len(&self) -> usize {
        self.per_degree.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for AdjustmentSets {
    /// `({T_vg},{T_g},{T_b},{T_vb})` with each multiset sorted ascending.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, degree) in OrdinalDegree::ALL.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            let mut sorted = self.set(*degree).to_vec();
            sorted.sort();
            let items: Vec<String> = sorted.iter().map(ToString::to_string).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        f.write_str(")")
    }
}

/// Recommender trust degree in `0..=3`; lower means closer agreement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecommenderTrustDegree(u8);

impl RecommenderTrustDegree {
    pub fn new(rtd: u8) -> Option<Self> {
        (rtd <= 3).then_some(RecommenderTrustDegree(rtd))
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

/// Frequency table over shift values `-3..=3`.
fn frequencies(values: impl Iterator<Item = i8>) -> [usize; 7] {
    let mut freq = [0usize; 7];
    for v in values {
        freq[(v + 3) as usize] += 1;
    }
    freq
}

/// Mode of `|shift|` over the union of all sets, largest distance on ties.
pub fn recommender_trust_degree(sets: &AdjustmentSets) -> Result<RecommenderTrustDegree, ArhError> {
    if sets.is_empty() {
        return Err(ArhError::UnknownRecommender);
    }
    let freq = frequencies(sets.union().map(|s| s.magnitude() as i8));
    // Magnitudes land in slots 3..=6; descending scan with strict `>` keeps the largest tied value.
    let mut best = 3u8;
    for magnitude in (0..=3u8).rev() {
        if freq[usize::from(magnitude) + 3] > freq[usize::from(best) + 3] {
            best = magnitude;
        }
    }
    Ok(RecommenderTrustDegree(best))
}

/// Correction for recommendations of `degree`: the mode of that degree's set.
///
/// An empty set yields zero. Ties prefer the smallest magnitude, then the
/// negative value.
pub fn semantic_distance(sets: &AdjustmentSets, degree: OrdinalDegree) -> SemanticShift {
    let history = sets.set(degree);
    if history.is_empty() {
        return SemanticShift::ZERO;
    }
    let freq = frequencies(history.iter().map(|s| s.value()));
    const PREFERENCE: [i8; 7] = [0, -1, 1, -2, 2, -3, 3];
    let mut best = PREFERENCE[0];
    for candidate in PREFERENCE {
        if freq[(candidate + 3) as usize] > freq[(best + 3) as usize] {
            best = candidate;
        }
    }
    SemanticShift::new(i64::from(best)).expect("mode of in-range shifts")
}

/// `rd* = rd ⊕ sd`.
pub fn adjust_recommendation(recommended: OrdinalDegree, correction: SemanticShift) -> OrdinalDegree {
    degree_shift(recommended, correction)
}

/// Recommender weight: `0 -> 9`, `1 -> 5`, `2 -> 3`, `3 -> 1`, unknown `-> 0`.
pub fn weight_of(rtd: Option<RecommenderTrustDegree>) -> u32 {
    match rtd.map(RecommenderTrustDegree::value) {
        Some(0) => 9,
        Some(1) => 5,
        Some(2) => 3,
        Some(3) => 1,
        Some(_) => unreachable!("RecommenderTrustDegree is bounded to 0..=3"),
        None => 0,
    }
}

/// Weighted vote over adjusted degrees; the combined trust degree.
///
/// Ties between degree totals go to the lowest-ranked degree.
pub fn combine_recommendations(items: &[(OrdinalDegree, u32)]) -> Result<OrdinalDegree, ArhError> {
    let mut sums = [0u64; 4];
    for &(degree, weight) in items {
        sums[usize::from(degree.rank())] += u64::from(weight);
    }
    if sums.iter().all(|&s| s == 0) {
        return Err(ArhError::NoUsableRecommendations);
    }
    let mut best = 0usize;
    for rank in 1..4 {
        if sums[rank] > sums[best] {
            best = rank;
        }
    }
    Ok(OrdinalDegree::ALL[best])
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecommenderStore {
    entries: BTreeMap<(Context, AgentId), AdjustmentSets>,
}

impl RecommenderStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores `own - recommended` in the recommender's set for `recommended`.
    pub fn record_adjustment(
        &mut self,
        context: &Context,
        recommender: &AgentId,
        recommended: OrdinalDegree,
        own: OrdinalDegree,
    ) {
        self.entries
            .entry((context.clone(), recommender.clone()))
            .or_default()
            .push(recommended, degree_distance(own, recommended));
    }

    pub fn sets(&self, context: &Context, recommender: &AgentId) -> Option<&AdjustmentSets> {
        self.entries.get(&(context.clone(), recommender.clone()))
    }

    /// Weight of a recommender; zero when it has no history.
    pub fn weight(&self, context: &Context, recommender: &AgentId) -> u32 {
        let rtd = self
            .sets(context, recommender)
            .and_then(|sets| recommender_trust_degree(sets).ok());
        weight_of(rtd)
    }

    /// Corrects a recommendation using the recommender's history for that degree.
    pub fn adjust(&self, context: &Context, recommender: &AgentId, recommended: OrdinalDegree) -> OrdinalDegree {
        let correction = self
            .sets(context, recommender)
            .map_or(SemanticShift::ZERO, |sets| semantic_distance(sets, recommended));
        adjust_recommendation(recommended, correction)
    }

    /// Seeds a newcomer's store before it starts interacting.
    ///
    /// Rejects the whole batch if any key repeats or is already present.
    pub fn bootstrap_newcomer(
        &mut self,
        seeds: impl IntoIterator<Item = (Context, AgentId, AdjustmentSets)>,
    ) -> Result<(), ArhError> {
        let mut staged = BTreeMap::new();
        for (context, agent, sets) in seeds {
            let key = (context, agent);
            if self.entries.contains_key(&key) || staged.contains_key(&key) {
                let (context, agent) = key;
                return Err(ArhError::DuplicateSeed { context, agent });
            }
            staged.insert(key, sets);
        }
        for (key, sets) in staged {
            match self.entries.entry(key) {
                Entry::Vacant(slot) => {
                    slot.insert(sets);
                }
                Entry::Occupied(_) => unreachable!("checked above"),
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `context<TAB>agent<TAB>({T_vg},{T_g},{T_b},{T_vb})`, one line per entry in key order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for ((context, agent), sets) in &self.entries {
            let _ = writeln!(out, "{context}\t{agent}\t{sets}");
        }
        out
    }
}
