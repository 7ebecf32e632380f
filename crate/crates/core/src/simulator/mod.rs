//! Seeded multi-agent community driving both trust models.
//!
//! Each round, every observer interacts with its partners (all other agents,
//! or one partner under round-robin). An interaction samples the subject's
//! outcome, pushes it into the observer's per-subject [`TrustState`] and
//! records it, banded to an ordinal degree, in the observer's
//! [`DirectTrustStore`].
//!
//! At first contact the observer gathers recommendations from every other
//! agent that already holds an opinion about the subject. Opinions are read
//! from the state as it stood at the start of the round, so observers are
//! independent within a round and run in parallel. The tenths channel
//! bootstraps the risk model; the ordinal channel is corrected, weighted and
//! combined by the ARH model, then judged against the observer's own direct
//! degree once it exists.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::arh::{DirectTrustStore, RecommenderStore};
use crate::risk_trust::{bootstrap, evaluate, Characteristics, ReputationSample, TrustState};
use crate::trust_metric::{OrdinalDegree, TrustTenths};
use crate::{arh, AgentId, Context};

pub mod behavior;
pub mod report;
pub mod rng;
pub mod scenario;

pub use behavior::{ground_truth_characteristics, produce_recommendation, sample_outcome};
pub use report::{RecommendationEvent, RoundRecord, RoundTally, SimulationReport, CSV_COLUMNS};
pub use scenario::{AgentSpec, BehaviorProfile, ConfigError, Pairing, RecommenderProfile, Scenario};

/// Trust context used for every simulated interaction.
pub const CONTEXT: &str = "interaction";

struct Observer {
    index: usize,
    id: AgentId,
    risk: BTreeMap<usize, TrustState>,
    direct: DirectTrustStore,
    recommenders: RecommenderStore,
    adjustments: BTreeMap<usize, usize>,
    outcome_streams: BTreeMap<usize, rng::Stream>,
}

#[derive(Debug, Clone, Copy)]
struct Opinion {
    recommender: usize,
    tenths: TrustTenths,
    degree: OrdinalDegree,
    opinion: OrdinalDegree,
}

/// Subjects observer `observer` interacts with in `round`, ascending.
fn partners(pairing: Pairing, population: usize, round: u32, observer: usize) -> Vec<usize> {
    match pairing {
        Pairing::AllPairs => (0..population).filter(|&s| s != observer).collect(),
        Pairing::RoundRobin => {
            let step = 1 + (round as usize % (population - 1));
            vec![(observer + step) % population]
        }
    }
}

struct Outcome {
    records: Vec<RoundRecord>,
    events: Vec<RecommendationEvent>,
    tally: RoundTally,
}

struct Engine<'a> {
    scenario: &'a Scenario,
    agents: Vec<&'a AgentSpec>,
    context: Context,
}

impl Engine<'_> {
    /// Opinions other agents hold about `subject`, as reported through their profiles.
    fn gather(&self, observers: &[Observer], observer: usize, subject: usize) -> Vec<Opinion> {
        let subject_id = &self.agents[subject].id;
        observers
            .iter()
            .filter(|x| x.index != observer && x.index != subject)
            .filter_map(|x| {
                let td_gen = x.risk.get(&subject)?.td_gen()?;
                let opinion = x.direct.degree(&self.context, subject_id).ok()?;
                let (tenths, degree) = produce_recommendation(
                    self.agents[x.index].recommender,
                    TrustTenths::round_half_up(td_gen),
                    opinion,
                );
                Some(Opinion { recommender: x.index, tenths, degree, opinion })
            })
            .collect()
    }

    fn interact(&self, me: &mut Observer, round: u32, first_contacts: Vec<(usize, Vec<Opinion>)>) -> Outcome {
        let params = &self.scenario.params;
        let mut first_contacts: BTreeMap<usize, Vec<Opinion>> = first_contacts.into_iter().collect();
        let mut out = Outcome { records: Vec::new(), events: Vec::new(), tally: RoundTally::default() };

        for subject in partners(self.scenario.pairing, self.agents.len(), round, me.index) {
            let spec = self.agents[subject];
            let mut pending = Vec::new();
            let mut arh_combined = None;

            if let Some(opinions) = first_contacts.remove(&subject) {
                let sample = ReputationSample::new(opinions.iter().map(|o| o.tenths).collect());
                me.risk.insert(subject, bootstrap(Some(&sample), params));

                let mut weighted = Vec::with_capacity(opinions.len());
                for o in &opinions {
                    let from = &self.agents[o.recommender].id;
                    let adjusted = me.recommenders.adjust(&self.context, from, o.degree);
                    let weight = me.recommenders.weight(&self.context, from);
                    weighted.push((adjusted, weight));
                    pending.push((*o, adjusted, weight));
                }
                arh_combined = arh::combine_recommendations(&weighted).ok();
            }

            let stream = me
                .outcome_streams
                .entry(subject)
                .or_insert_with(|| rng::substream(self.scenario.seed, &spec.id, &format!("outcome/{}", me.id)));
            let outcome = sample_outcome(&spec.behavior, round, stream);
            out.tally.sampled_outcomes += 1;

            let state = me.risk.entry(subject).or_insert_with(|| bootstrap(None, params));
            let period_closed = state.push_experience(outcome, params);
            out.tally.trust_pushes += 1;

            me.direct
                .record_experience(&self.context, &spec.id, self.scenario.banding.degree_of(outcome));
            out.tally.experiences_recorded += 1;
            let own = me.direct.degree(&self.context, &spec.id).expect("experience just recorded");

            for (opinion, adjusted, weight) in pending {
                let from = &self.agents[opinion.recommender].id;
                me.recommenders.record_adjustment(&self.context, from, opinion.degree, own);
                let count = me.adjustments.entry(opinion.recommender).or_default();
                *count += 1;
                out.events.push(RecommendationEvent {
                    round,
                    observer: me.id.clone(),
                    recommender: from.clone(),
                    subject: spec.id.clone(),
                    opinion_degree: opinion.opinion,
                    reported_tenths: opinion.tenths,
                    reported_degree: opinion.degree,
                    adjusted_degree: adjusted,
                    weight,
                    own_degree: own,
                    weight_after: me.recommenders.weight(&self.context, from),
                    adjustments_recorded: *count,
                });
            }

            let state = &me.risk[&subject];
            out.records.push(RoundRecord {
                round,
                observer: me.id.clone(),
                subject: spec.id.clone(),
                outcome,
                td_gen: state.td_gen().unwrap_or(params.td_th),
                rv: state.rv().unwrap_or(params.rv_th),
                characteristics: evaluate(state, params),
                arh_direct: own,
                arh_combined,
                period_closed,
                periods_completed: state.window().period_index(),
            });
        }
        out
    }
}

/// Runs a scenario to completion. Identical scenarios give identical reports.
pub fn run_scenario(scenario: &Scenario) -> Result<SimulationReport, ConfigError> {
    scenario.validate()?;
    let mut agents: Vec<&AgentSpec> = scenario.agents.iter().collect();
    agents.sort_by(|a, b| a.id.cmp(&b.id));
    let engine = Engine { scenario, agents, context: Context::from(CONTEXT) };

    let mut observers: Vec<Observer> = engine
        .agents
        .iter()
        .enumerate()
        .map(|(index, spec)| Observer {
            index,
            id: spec.id.clone(),
            risk: BTreeMap::new(),
            direct: DirectTrustStore::new(),
            recommenders: RecommenderStore::new(),
            adjustments: BTreeMap::new(),
            outcome_streams: BTreeMap::new(),
        })
        .collect();

    let mut records = Vec::new();
    let mut events = Vec::new();
    let mut tallies = Vec::with_capacity(scenario.rounds as usize);

    for round in 0..scenario.rounds {
        let gathered: Vec<Vec<(usize, Vec<Opinion>)>> = observers
            .par_iter()
            .map(|me| {
                partners(scenario.pairing, engine.agents.len(), round, me.index)
                    .into_iter()
                    .filter(|s| !me.risk.contains_key(s))
                    .map(|s| (s, engine.gather(&observers, me.index, s)))
                    .collect()
            })
            .collect();

        let outcomes: Vec<Outcome> = observers
            .par_iter_mut()
            .zip(gathered)
            .map(|(me, first)| engine.interact(me, round, first))
            .collect();

        let mut tally = RoundTally::default();
        for o in outcomes {
            records.extend(o.records);
            events.extend(o.events);
            tally.sampled_outcomes += o.tally.sampled_outcomes;
            tally.trust_pushes += o.tally.trust_pushes;
            tally.experiences_recorded += o.tally.experiences_recorded;
        }
        tallies.push(tally);
    }

    let truths: BTreeMap<AgentId, Characteristics> = engine
        .agents
        .par_iter()
        .map(|spec| {
            let mut stream = rng::substream(scenario.seed, &spec.id, "ground-truth");
            (spec.id.clone(), ground_truth_characteristics(&spec.behavior, &scenario.params, &mut stream))
        })
        .collect();

    let agents = summarize_agents(&records, &truths);
    let reclassifications = reclassify(&engine.agents, &records, &truths);

    Ok(SimulationReport {
        seed: scenario.seed,
        rounds: scenario.rounds,
        pairing: scenario.pairing,
        records,
        recommendations: events,
        tallies,
        agents,
        reclassifications,
    })
}

fn summarize_agents(
    records: &[RoundRecord],
    truths: &BTreeMap<AgentId, Characteristics>,
) -> BTreeMap<AgentId, report::AgentSummary> {
    truths
        .iter()
        .map(|(id, truth)| {
            let about: Vec<_> = records.iter().filter(|r| &r.subject == id).collect();
            let n = about.len() as f64;
            let share = |hits: usize| (!about.is_empty()).then(|| hits as f64 / n);
            let risk_hits = about.iter().filter(|r| r.characteristics == *truth).count();
            let arh_hits = about
                .iter()
                .filter(|r| r.arh_direct.is_trustworthy() == truth.trustworthy)
                .count();
            let summary = report::AgentSummary {
                ground_truth: *truth,
                records: about.len() as u64,
                risk_trust_accuracy: share(risk_hits),
                arh_accuracy: share(arh_hits),
            };
            (id.clone(), summary)
        })
        .collect()
}

/// How long each observer takes to flip its verdict on a shifting subject.
fn reclassify(
    agents: &[&AgentSpec],
    records: &[RoundRecord],
    truths: &BTreeMap<AgentId, Characteristics>,
) -> Vec<report::Reclassification> {
    let mut out = Vec::new();
    for subject in agents {
        let Some(switch_round) = subject.behavior.switch_round() else { continue };
        let target = truths[&subject.id].trustworthy;
        for observer in agents.iter().filter(|o| o.id != subject.id) {
            let pair: Vec<&RoundRecord> = records
                .iter()
                .filter(|r| r.observer == observer.id && r.subject == subject.id)
                .collect();
            let periods_before = pair
                .iter()
                .take_while(|r| r.round < switch_round)
                .last()
                .map_or(0, |r| r.periods_completed);
            let after = || pair.iter().filter(|r| r.round >= switch_round);
            let risk = after().find(|r| r.characteristics.trustworthy == target);
            let arh = after().find(|r| r.arh_direct.is_trustworthy() == target);
            out.push(report::Reclassification {
                observer: observer.id.clone(),
                subject: subject.id.clone(),
                switch_round,
                risk_trust_rounds: risk.map(|r| r.round - switch_round),
                risk_trust_periods: risk.map(|r| r.periods_completed - periods_before),
                arh_rounds: arh.map(|r| r.round - switch_round),
            });
        }
    }
    out
}
