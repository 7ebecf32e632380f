use std::collections::BTreeMap;
use std::io;

use crate::format::{real, Json};
use crate::risk_trust::Characteristics;
use crate::simulator::scenario::Pairing;
use crate::trust_metric::{OrdinalDegree, TrustTenths};
use crate::AgentId;

pub const CSV_COLUMNS: [&str; 10] = [
    "round",
    "observer",
    "subject",
    "outcome",
    "td_gen",
    "rv",
    "trustworthy",
    "risky",
    "arh_direct",
    "arh_combined",
];

/// One observer-subject interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: u32,
    pub observer: AgentId,
    pub subject: AgentId,
    pub outcome: TrustTenths,
    pub td_gen: f64,
    pub rv: f64,
    pub characteristics: Characteristics,
    pub arh_direct: OrdinalDegree,
    /// Present only when recommendations were gathered and at least one carried weight.
    pub arh_combined: Option<OrdinalDegree>,
    pub period_closed: bool,
    /// Periods completed for this pair so far, including this interaction.
    pub periods_completed: u64,
}

/// A recommendation received at first contact, and how it was judged afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecommendationEvent {
    pub round: u32,
    pub observer: AgentId,
    pub recommender: AgentId,
    pub subject: AgentId,
    /// The recommender's own direct degree before its profile was applied.
    pub opinion_degree: OrdinalDegree,
    pub reported_tenths: TrustTenths,
    pub reported_degree: OrdinalDegree,
    /// Reported degree after semantic-distance correction.
    pub adjusted_degree: OrdinalDegree,
    pub weight: u32,
    /// The observer's direct degree right after its first interaction with the subject.
    pub own_degree: OrdinalDegree,
    /// Recommender weight once this adjustment was recorded.
    pub weight_after: u32,
    /// Adjustments recorded by this observer for this recommender, including this one.
    pub adjustments_recorded: usize,
}

/// Per-round bookkeeping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RoundTally {
    pub sampled_outcomes: u64,
    pub trust_pushes: u64,
    pub experiences_recorded: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentSummary {
    pub ground_truth: Characteristics,
    pub records: u64,
    pub risk_trust_accuracy: Option<f64>,
    pub arh_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reclassification {
    pub observer: AgentId,
    pub subject: AgentId,
    pub switch_round: u32,
    pub risk_trust_rounds: Option<u32>,
    pub risk_trust_periods: Option<u64>,
    pub arh_rounds: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub seed: u64,
    pub rounds: u32,
    pub pairing: Pairing,
    pub records: Vec<RoundRecord>,
    pub recommendations: Vec<RecommendationEvent>,
    pub tallies: Vec<RoundTally>,
    pub agents: BTreeMap<AgentId, AgentSummary>,
    pub reclassifications: Vec<Reclassification>,
}

impl SimulationReport {
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(CSV_COLUMNS)?;
        for r in &self.records {
            writer.write_record([
                r.round.to_string(),
                r.observer.to_string(),
                r.subject.to_string(),
                r.outcome.to_string(),
                real(r.td_gen),
                real(r.rv),
                r.characteristics.trustworthy.to_string(),
                r.characteristics.risky.to_string(),
                r.arh_direct.to_string(),
                r.arh_combined.map(|d| d.to_string()).unwrap_or_default(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory CSV");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    pub fn summary_json(&self) -> Json {
        let opt_int = |v: Option<u64>| v.map_or(Json::Null, |v| Json::Int(v as i64));
        let agents = self.agents.iter().map(|(id, a)| {
            (
                id.to_string(),
                Json::object([
                    (
                        "ground_truth",
                        Json::object([
                            ("trustworthy", Json::Bool(a.ground_truth.trustworthy)),
                            ("risky", Json::Bool(a.ground_truth.risky)),
                        ]),
                    ),
                    ("records", Json::Int(a.records as i64)),
                    ("risk_trust_accuracy", Json::opt_real(a.risk_trust_accuracy)),
                    ("arh_accuracy", Json::opt_real(a.arh_accuracy)),
                ]),
            )
        });
        let reclass = self.reclassifications.iter().map(|r| {
            Json::object([
                ("observer", Json::str(&r.observer)),
                ("subject", Json::str(&r.subject)),
                ("switch_round", Json::Int(i64::from(r.switch_round))),
                (
                    "risk_trust",
                    Json::object([
                        ("rounds", opt_int(r.risk_trust_rounds.map(u64::from))),
                        ("periods", opt_int(r.risk_trust_periods)),
                    ]),
                ),
                ("arh", Json::object([("rounds", opt_int(r.arh_rounds.map(u64::from)))])),
            ])
        });
        let adjustments = self.recommendations.len();
        let combined = self.records.iter().filter(|r| r.arh_combined.is_some()).count();
        Json::object([
            ("seed", Json::Str(self.seed.to_string())),
            ("rounds", Json::Int(i64::from(self.rounds))),
            (
                "pairing",
                Json::str(match self.pairing {
                    Pairing::AllPairs => "all-pairs",
                    Pairing::RoundRobin => "round-robin",
                }),
            ),
            ("records", Json::Int(self.records.len() as i64)),
            (
                "recommendations",
                Json::object([
                    ("received", Json::Int(adjustments as i64)),
                    ("combined_verdicts", Json::Int(combined as i64)),
                ]),
            ),
            ("agents", Json::Object(agents.collect())),
            ("reclassification", Json::Array(reclass.collect())),
        ])
    }
}
