//! Utility and effectiveness metrics: reduction ratios, runtime and energy
//! deltas from resource traces, and debrief-pair comparison scores.
//!
//! Everything numeric is generic over the float type; `f64` is what the
//! pipeline uses.

use std::collections::BTreeSet;

use num_traits::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emu_sim::{DebriefReport, StepStatus};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("twin count {twin} exceeds full count {full}")]
    TwinExceedsFull { full: usize, twin: usize },
    #[error("relative delta undefined: full-side mean is zero")]
    UndefinedDelta,
    #[error("{0} undefined: empty reference set")]
    EmptySet(&'static str),
    #[error("order similarity undefined: fewer than two common elements")]
    TooFewCommon,
    #[error("resource trace: {0}")]
    Trace(String),
}

/// Host and connection counts of a topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyStats {
    pub hosts: usize,
    pub links: usize,
}

impl TopologyStats {
    pub fn new(hosts: usize, links: usize) -> Self {
        TopologyStats { hosts, links }
    }
}

fn hundred<F: Float>() -> F {
    F::from(100.0).unwrap()
}

/// Percent of hosts and connections eliminated by reduction.
pub fn reduction_ratios<F: Float>(
    full: TopologyStats,
    twin: TopologyStats,
) -> Result<(F, F), MetricsError> {
    if twin.hosts > full.hosts || twin.links > full.links {
        return Err(MetricsError::TwinExceedsFull {
            full: full.hosts.max(full.links),
            twin: twin.hosts.max(twin.links),
        });
    }
    let ratio = |f: usize, t: usize| {
        let f = F::from(f).unwrap();
        let t = F::from(t).unwrap();
        (f - t) / f * hundred()
    };
    Ok((ratio(full.hosts, twin.hosts), ratio(full.links, twin.links)))
}

/// Relative saving in percent: (full - twin) / full * 100.
pub fn relative_delta<F: Float>(full_mean: F, twin_mean: F) -> Result<F, MetricsError> {
    if full_mean <= F::zero() {
        return Err(MetricsError::UndefinedDelta);
    }
    Ok((full_mean - twin_mean) / full_mean * hundred())
}

/// Boot time difference in seconds.
pub fn boot_time_delta<F: Float>(t_full: F, t_twin: F) -> F {
    t_full - t_twin
}

/// Per-vCPU power draw in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams<F> {
    pub p_vcpu_watts: F,
}

impl<F: Float> Default for EnergyParams<F> {
    fn default() -> Self {
        EnergyParams {
            p_vcpu_watts: F::from(11.5).unwrap(),
        }
    }
}

/// E = (C / 100) * P_vCPU * (t / 3600) watt-hours.
pub fn energy_wh<F: Float>(cpu_mean_pct: F, params: EnergyParams<F>, t_seconds: F) -> F {
    cpu_mean_pct / hundred() * params.p_vcpu_watts * (t_seconds / F::from(3600.0).unwrap())
}

/// Energy saving as a signed percent: negative when the twin uses less.
pub fn energy_delta_pct<F: Float>(e_full: F, e_twin: F) -> Result<F, MetricsError> {
    Ok(-relative_delta(e_full, e_twin)?)
}

/// One sampled row of a resource trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample<F> {
    pub timestamp_s: F,
    pub cpu_pct: F,
    pub ram_gb: F,
    pub io_bytes: F,
}

/// Resource usage over one run; duration is the last timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceTrace<F> {
    pub samples: Vec<TraceSample<F>>,
}

pub type ResourceTrace64 = ResourceTrace<f64>;

impl<F: Float + std::str::FromStr> ResourceTrace<F> {
    /// CSV with header `timestamp_s,cpu_pct,ram_gb,io_bytes`.
    pub fn parse_csv(text: &str) -> Result<Self, MetricsError> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut samples: Vec<TraceSample<F>> = Vec::new();
        for row in reader.records() {
            let row = row.map_err(|e| MetricsError::Trace(e.to_string()))?;
            let field = |i: usize| -> Result<F, MetricsError> {
                row.get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| {
                        MetricsError::Trace(format!("bad field {i} in row {row:?}"))
                    })
            };
            let sample = TraceSample {
                timestamp_s: field(0)?,
                cpu_pct: field(1)?,
                ram_gb: field(2)?,
                io_bytes: field(3)?,
            };
            if sample.cpu_pct < F::zero() || sample.cpu_pct > hundred() {
                return Err(MetricsError::Trace("cpu_pct outside [0, 100]".into()));
            }
            if let Some(last) = samples.last() {
                if sample.timestamp_s < last.timestamp_s {
                    return Err(MetricsError::Trace(
                        "timestamps must be monotone".into(),
                    ));
                }
            }
            samples.push(sample);
        }
        Ok(ResourceTrace { samples })
    }

    pub fn duration_s(&self) -> F {
        self.samples
            .last()
            .map(|s| s.timestamp_s)
            .unwrap_or_else(F::zero)
    }

    fn mean(&self, pick: impl Fn(&TraceSample<F>) -> F) -> F {
        if self.samples.is_empty() {
            return F::zero();
        }
        let sum = self
            .samples
            .iter()
            .fold(F::zero(), |acc, s| acc + pick(s));
        sum / F::from(self.samples.len()).unwrap()
    }

    pub fn cpu_mean(&self) -> F {
        self.mean(|s| s.cpu_pct)
    }

    pub fn ram_mean(&self) -> F {
        self.mean(|s| s.ram_gb)
    }

    pub fn io_mean(&self) -> F {
        self.mean(|s| s.io_bytes)
    }
}

/// |Succ_full ∩ Succ_twin| / |Succ_full|.
pub fn ability_success_parity<F: Float>(
    succ_full: &BTreeSet<String>,
    succ_twin: &BTreeSet<String>,
) -> Result<F, MetricsError> {
    if succ_full.is_empty() {
        return Err(MetricsError::EmptySet("ASP"));
    }
    let common = succ_full.intersection(succ_twin).count();
    Ok(F::from(common).unwrap() / F::from(succ_full.len()).unwrap())
}

/// Jaccard similarity of technique sets.
pub fn technique_coverage_parity<F: Float>(
    tf: &BTreeSet<String>,
    tt: &BTreeSet<String>,
) -> Result<F, MetricsError> {
    let union = tf.union(tt).count();
    if union == 0 {
        return Err(MetricsError::EmptySet("TCP"));
    }
    let common = tf.intersection(tt).count();
    Ok(F::from(common).unwrap() / F::from(union).unwrap())
}

/// Share of full-graph edges reproduced in the twin graph, matched by
/// canonical node labels (host-map renaming is the caller's job).
pub fn path_equivalence<F: Float>(
    full_edges: &[(String, String)],
    twin_edges: &[(String, String)],
) -> Result<F, MetricsError> {
    let full: BTreeSet<&(String, String)> = full_edges.iter().collect();
    if full.is_empty() {
        return Err(MetricsError::EmptySet("PES"));
    }
    let twin: BTreeSet<&(String, String)> = twin_edges.iter().collect();
    let reproduced = full.intersection(&twin).count();
    Ok(F::from(reproduced).unwrap() / F::from(full.len()).unwrap())
}

/// First-occurrence dedup, preserving order.
fn dedup_sequence(seq: &[String]) -> Vec<&str> {
    let mut seen = BTreeSet::new();
    seq.iter()
        .filter(|s| seen.insert(s.as_str()))
        .map(String::as_str)
        .collect()
}

/// Kendall tau-a over the elements common to both sequences (duplicates
/// collapsed to their first occurrence): (concordant - discordant) / (m(m-1)/2).
pub fn order_similarity<F: Float>(
    seq_full: &[String],
    seq_twin: &[String],
) -> Result<F, MetricsError> {
    let full = dedup_sequence(seq_full);
    let twin = dedup_sequence(seq_twin);
    let twin_pos = |x: &str| twin.iter().position(|t| *t == x);
    let common: Vec<(usize, usize)> = full
        .iter()
        .enumerate()
        .filter_map(|(i, x)| twin_pos(x).map(|j| (i, j)))
        .collect();
    let m = common.len();
    if m < 2 {
        return Err(MetricsError::TooFewCommon);
    }
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    for a in 0..m {
        for b in a + 1..m {
            let (ia, ja) = common[a];
            let (ib, jb) = common[b];
            if (ia < ib) == (ja < jb) {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let pairs = (m * (m - 1) / 2) as i64;
    Ok(F::from(concordant - discordant).unwrap() / F::from(pairs).unwrap())
}

/// 0 iff the goal was reached in both runs.
pub fn objective_discrepancy(full_success: bool, twin_success: bool) -> u8 {
    u8::from(!(full_success && twin_success))
}

/// Composite Table 2 scores; fields are `None` where the metric is undefined
/// for the given pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivenessReport<F> {
    pub asp: Option<F>,
    pub tcp: Option<F>,
    pub pes: Option<F>,
    pub tau: Option<F>,
    pub delta_obj: u8,
}

pub type EffectivenessReport64 = EffectivenessReport<f64>;

fn successful_abilities(report: &DebriefReport) -> BTreeSet<String> {
    report
        .steps
        .iter()
        .filter(|s| s.status == StepStatus::Success)
        .map(|s| s.ability_number.clone())
        .collect()
}

fn successful_techniques(report: &DebriefReport) -> BTreeSet<String> {
    report
        .steps
        .iter()
        .filter(|s| s.status == StepStatus::Success)
        .map(|s| s.technique.clone())
        .collect()
}

fn ability_sequence(report: &DebriefReport) -> Vec<String> {
    report
        .steps
        .iter()
        .map(|s| s.ability_number.clone())
        .collect()
}

/// Compare a paired full/twin debrief plus the two graphs' labeled edges.
/// Undefined metrics stay `None`; nothing here is a hard failure.
pub fn compare_debriefs<F: Float>(
    full: &DebriefReport,
    twin: &DebriefReport,
    full_edges: &[(String, String)],
    twin_edges: &[(String, String)],
) -> EffectivenessReport<F> {
    EffectivenessReport {
        asp: ability_success_parity(&successful_abilities(full), &successful_abilities(twin))
            .ok(),
        tcp: technique_coverage_parity(
            &successful_techniques(full),
            &successful_techniques(twin),
        )
        .ok(),
        pes: path_equivalence(full_edges, twin_edges).ok(),
        tau: order_similarity(&ability_sequence(full), &ability_sequence(twin)).ok(),
        delta_obj: objective_discrepancy(full.success, twin.success),
    }
}

/// Utility rows for CSV export, one run pair per struct.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityReport<F> {
    pub r_h: F,
    pub r_e: F,
    pub delta_cpu_pct: F,
    pub delta_ram_pct: F,
    pub delta_io_pct: F,
    pub delta_t_s: F,
    pub e_full_wh: F,
    pub e_twin_wh: F,
    pub delta_e_pct: F,
}

pub type UtilityReport64 = UtilityReport<f64>;

/// Compute the whole utility table from counts and traces.
pub fn utility_report<F: Float + std::str::FromStr>(
    full_stats: TopologyStats,
    twin_stats: TopologyStats,
    full_trace: &ResourceTrace<F>,
    twin_trace: &ResourceTrace<F>,
    params: EnergyParams<F>,
) -> Result<UtilityReport<F>, MetricsError> {
    let (r_h, r_e) = reduction_ratios(full_stats, twin_stats)?;
    let e_full = energy_wh(full_trace.cpu_mean(), params, full_trace.duration_s());
    let e_twin = energy_wh(twin_trace.cpu_mean(), params, twin_trace.duration_s());
    Ok(UtilityReport {
        r_h,
        r_e,
        delta_cpu_pct: relative_delta(full_trace.cpu_mean(), twin_trace.cpu_mean())?,
        delta_ram_pct: relative_delta(full_trace.ram_mean(), twin_trace.ram_mean())?,
        delta_io_pct: relative_delta(full_trace.io_mean(), twin_trace.io_mean())?,
        delta_t_s: boot_time_delta(full_trace.duration_s(), twin_trace.duration_s()),
        e_full_wh: e_full,
        e_twin_wh: e_twin,
        delta_e_pct: energy_delta_pct(e_full, e_twin)?,
    })
}

/// CSV rendering: percents to 2 decimals, watt-hours to 4.
pub fn utility_csv(report: &UtilityReport<f64>) -> String {
    let mut out = String::from("metric,value\n");
    for (name, value) in [
        ("R_H_pct", format!("{:.2}", report.r_h)),
        ("R_E_pct", format!("{:.2}", report.r_e)),
        ("delta_cpu_pct", format!("{:.2}", report.delta_cpu_pct)),
        ("delta_ram_pct", format!("{:.2}", report.delta_ram_pct)),
        ("delta_io_pct", format!("{:.2}", report.delta_io_pct)),
        ("delta_t_s", format!("{:.0}", report.delta_t_s)),
        ("E_full_wh", format!("{:.4}", report.e_full_wh)),
        ("E_twin_wh", format!("{:.4}", report.e_twin_wh)),
        ("delta_E_pct", format!("{:.2}", report.delta_e_pct)),
    ] {
        out.push_str(name);
        out.push(',');
        out.push_str(&value);
        out.push('\n');
    }
    out
}

pub fn effectiveness_csv(report: &EffectivenessReport<f64>) -> String {
    let cell = |v: Option<f64>| match v {
        Some(x) => format!("{x:.2}"),
        None => "undefined".to_string(),
    };
    format!(
        "metric,value\nASP,{}\nTCP,{}\nPES,{}\ntau,{}\ndelta_obj,{}\n",
        cell(report.asp),
        cell(report.tcp),
        cell(report.pes),
        cell(report.tau),
        report.delta_obj
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, eps: f64) -> bool {
        (a - b).abs() <= eps
    }

    #[test]
    fn reduction_ratio_values() {
        let (rh, re): (f64, f64) =
            reduction_ratios(TopologyStats::new(54, 53), TopologyStats::new(10, 9)).unwrap();
        assert!(close(rh, 81.48, 0.01));
        assert!(close(re, 83.02, 0.01));
        let (rh, re): (f64, f64) =
            reduction_ratios(TopologyStats::new(1471, 1469), TopologyStats::new(12, 11))
                .unwrap();
        assert!(close(rh, 99.18, 0.01));
        assert!(close(re, 99.25, 0.01));
        let (rh, re): (f64, f64) =
            reduction_ratios(TopologyStats::new(5, 4), TopologyStats::new(5, 4)).unwrap();
        assert_eq!((rh, re), (0.0, 0.0));
    }

    #[test]
    fn oversized_twin_rejected() {
        assert!(matches!(
            reduction_ratios::<f64>(TopologyStats::new(5, 4), TopologyStats::new(6, 4)),
            Err(MetricsError::TwinExceedsFull { .. })
        ));
    }

    #[test]
    fn relative_delta_values() {
        assert!(close(relative_delta(13.64, 11.11).unwrap(), 18.55, 0.01));
        assert!(close(relative_delta(40.77, 21.00).unwrap(), 48.49, 0.01));
        assert_eq!(relative_delta(7.0, 7.0).unwrap(), 0.0);
        assert_eq!(relative_delta(7.0, 0.0).unwrap(), 100.0);
        assert!(relative_delta(0.0, 1.0).is_err());
    }

    #[test]
    fn boot_delta_values() {
        assert_eq!(boot_time_delta(736.0, 456.0), 280.0);
        assert_eq!(boot_time_delta(337.0, 252.0), 85.0);
    }

    #[test]
    fn energy_values() {
        let params = EnergyParams::default();
        assert!(close(energy_wh(13.64, params, 736.0), 0.3207, 0.0005));
        assert!(close(energy_wh(40.8, params, 337.0), 0.439, 0.0005));
        assert_eq!(energy_wh(0.0, params, 500.0), 0.0);
    }

    #[test]
    fn energy_is_linear() {
        let params = EnergyParams { p_vcpu_watts: 11.5 };
        let base = energy_wh(20.0, params, 600.0);
        assert!(close(energy_wh(40.0, params, 600.0), 2.0 * base, 1e-12));
        assert!(close(energy_wh(20.0, params, 1200.0), 2.0 * base, 1e-12));
        let double_power = EnergyParams { p_vcpu_watts: 23.0 };
        assert!(close(energy_wh(20.0, double_power, 600.0), 2.0 * base, 1e-12));
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn asp_values() {
        assert_eq!(
            ability_success_parity::<f64>(&set(&["a", "b", "c"]), &set(&["a", "b", "c"]))
                .unwrap(),
            1.0
        );
        assert!(close(
            ability_success_parity(&set(&["a", "b", "c"]), &set(&["a", "b"])).unwrap(),
            2.0 / 3.0,
            1e-12
        ));
        assert!(ability_success_parity::<f64>(&set(&[]), &set(&["a"])).is_err());
    }

    #[test]
    fn tcp_values() {
        assert_eq!(
            technique_coverage_parity::<f64>(&set(&["T1", "T2"]), &set(&["T1", "T2"]))
                .unwrap(),
            1.0
        );
        assert!(close(
            technique_coverage_parity(&set(&["T1", "T2"]), &set(&["T2", "T3"])).unwrap(),
            1.0 / 3.0,
            1e-12
        ));
        assert_eq!(
            technique_coverage_parity::<f64>(&set(&["T1"]), &set(&["T2"])).unwrap(),
            0.0
        );
        assert!(technique_coverage_parity::<f64>(&set(&[]), &set(&[])).is_err());
    }

    fn edges(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn pes_values() {
        let full = edges(&[("a", "b"), ("b", "c"), ("c", "d")]);
        assert_eq!(path_equivalence::<f64>(&full, &full).unwrap(), 1.0);
        let minus_one = edges(&[("a", "b"), ("b", "c")]);
        assert!(close(
            path_equivalence(&full, &minus_one).unwrap(),
            2.0 / 3.0,
            1e-12
        ));
        assert!(path_equivalence::<f64>(&[], &full).is_err());
    }

    fn seq(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tau_values() {
        assert_eq!(
            order_similarity::<f64>(&seq(&["a", "b", "c"]), &seq(&["a", "b", "c"])).unwrap(),
            1.0
        );
        assert_eq!(
            order_similarity::<f64>(&seq(&["a", "b", "c"]), &seq(&["c", "b", "a"])).unwrap(),
            -1.0
        );
        assert!(close(
            order_similarity(&seq(&["a", "b", "c"]), &seq(&["a", "c", "b"])).unwrap(),
            1.0 / 3.0,
            1e-12
        ));
        assert!(order_similarity::<f64>(&seq(&["a"]), &seq(&["a"])).is_err());
    }

    #[test]
    fn tau_collapses_duplicates() {
        // repeated element keeps its first position only
        let full = seq(&["a", "b", "c", "b"]);
        let twin = seq(&["a", "b", "c"]);
        assert_eq!(order_similarity::<f64>(&full, &twin).unwrap(), 1.0);
    }

    #[test]
    fn objective_discrepancy_values() {
        assert_eq!(objective_discrepancy(true, true), 0);
        assert_eq!(objective_discrepancy(true, false), 1);
        assert_eq!(objective_discrepancy(false, false), 1);
    }

    #[test]
    fn trace_parsing_and_stats() {
        let trace: ResourceTrace<f64> = ResourceTrace::parse_csv(
            "timestamp_s,cpu_pct,ram_gb,io_bytes\n0,10,4,100\n2,20,4,100\n4,30,4,100\n",
        )
        .unwrap();
        assert_eq!(trace.duration_s(), 4.0);
        assert!(close(trace.cpu_mean(), 20.0, 1e-12));
        assert_eq!(trace.ram_mean(), 4.0);
    }

    #[test]
    fn trace_rejects_bad_rows() {
        assert!(ResourceTrace::<f64>::parse_csv(
            "timestamp_s,cpu_pct,ram_gb,io_bytes\n0,150,4,100\n"
        )
        .is_err());
        assert!(ResourceTrace::<f64>::parse_csv(
            "timestamp_s,cpu_pct,ram_gb,io_bytes\n5,10,4,100\n2,10,4,100\n"
        )
        .is_err());
    }

    #[test]
    fn csv_rendering_rounds() {
        let report = UtilityReport {
            r_h: 81.481481,
            r_e: 83.018867,
            delta_cpu_pct: 18.5467,
            delta_ram_pct: 3.71,
            delta_io_pct: 0.0,
            delta_t_s: 280.0,
            e_full_wh: 0.320742,
            e_twin_wh: 0.160496,
            delta_e_pct: -49.961,
        };
        let csv = utility_csv(&report);
        assert!(csv.contains("R_H_pct,81.48"));
        assert!(csv.contains("E_full_wh,0.3207"));
        assert!(csv.contains("delta_E_pct,-49.96"));
    }
}
