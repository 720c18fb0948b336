//! The analysis report document: every decomposition scalar rendered at a
//! fixed 12 significant digits, with deterministic key order, so reports
//! diff cleanly across runs.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::decomposition::{AgentEntropy, AgentEntropyProfile, EntropyReport, GroupDecomposition};

#[derive(Serialize)]
struct Totals {
    total_entropy: f64,
    savings_split_entropy: f64,
    savings_prob: f64,
    interagent_prob: f64,
    savings_entropy: Option<f64>,
    interagent_entropy: Option<f64>,
    out_marginal_entropy: Option<f64>,
    in_marginal_entropy: Option<f64>,
}

#[derive(Serialize)]
struct Residuals {
    sum_identity: Option<f64>,
    diff_identity: Option<f64>,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    totals: Totals,
    agents: &'a [AgentEntropy],
    groups: Option<&'a GroupDecomposition>,
    residuals: Residuals,
}

/// Pretty JSON with every float printed as `d.dddddddddddE±x` (12
/// significant digits); `null` marks undefined branches.
struct ReportFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl ReportFormatter<'_> {
    fn new() -> Self {
        Self {
            inner: PrettyFormatter::new(),
        }
    }
}

impl Formatter for ReportFormatter<'_> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.11e}")
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_object_value(writer)
    }
}

/// Renders the full analysis document. Identical inputs produce identical
/// bytes.
pub fn write_report(
    report: &EntropyReport,
    profile: &AgentEntropyProfile,
    groups: Option<&GroupDecomposition>,
) -> Vec<u8> {
    let doc = ReportDoc {
        totals: Totals {
            total_entropy: report.total_entropy,
            savings_split_entropy: report.savings_split_entropy,
            savings_prob: report.savings_prob,
            interagent_prob: report.interagent_prob,
            savings_entropy: report.savings_entropy,
            interagent_entropy: report.interagent_entropy,
            out_marginal_entropy: report.out_marginal_entropy,
            in_marginal_entropy: report.in_marginal_entropy,
        },
        agents: &profile.agents,
        groups,
        residuals: Residuals {
            sum_identity: report.sum_identity_residual,
            diff_identity: report.diff_identity_residual,
        },
    };
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, ReportFormatter::new());
    doc.serialize(&mut ser)
        .expect("report document always serializes");
    buf.push(b'\n');
    buf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{full_report, group_decomposition, GroupTree, Side};
    use crate::flow::FlowMatrix;
    use crate::test_support::three_agent_reference;

    #[test]
    // The published differential 0.3927 coincidentally sits next to pi/8.
    #[allow(clippy::approx_constant)]
    fn report_contains_reference_differential() {
        let m = three_agent_reference();
        let (report, profile) = full_report(&m);
        let bytes = write_report(&report, &profile, None);
        let doc: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        let d1 = doc["agents"][0]["differential"].as_f64().unwrap();
        assert!((d1 - 0.3927).abs() < 5e-4);
        assert!(doc["groups"].is_null());
        assert!(doc["residuals"]["sum_identity"].as_f64().unwrap().abs() < 1e-10);
    }

    #[test]
    fn report_is_deterministic() {
        let m = three_agent_reference();
        let (report, profile) = full_report(&m);
        let tree = GroupTree::flat(m.agents());
        let groups = group_decomposition(&m, &tree, Side::In).unwrap();
        let a = write_report(&report, &profile, Some(&groups));
        let b = write_report(&report, &profile, Some(&groups));
        assert_eq!(a, b);
    }

    #[test]
    fn savings_only_branch_is_rendered_as_null() {
        let m = FlowMatrix::from_entries(vec![vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let (report, profile) = full_report(&m);
        let bytes = write_report(&report, &profile, None);
        let doc: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert!(doc["totals"]["interagent_entropy"].is_null());
        assert!(doc["agents"][0]["out_prob"].is_null());
        assert!(doc["residuals"]["diff_identity"].is_null());
        assert!(doc["totals"]["savings_entropy"].as_f64().is_some());
    }

    #[test]
    fn floats_carry_twelve_significant_digits() {
        let m = three_agent_reference();
        let (report, profile) = full_report(&m);
        let text = String::from_utf8(write_report(&report, &profile, None)).unwrap();
        // Every numeric field is mantissa.11-digits e exponent.
        let line = text
            .lines()
            .find(|l| l.contains("\"total_entropy\""))
            .unwrap();
        let value = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
        let (mantissa, _exp) = value.split_once('e').unwrap();
        let digits = mantissa.split_once('.').unwrap().1;
        assert_eq!(digits.len(), 11, "unexpected rendering: {value}");
    }

    #[test]
    fn group_section_round_trips_structure() {
        let m = three_agent_reference();
        let (report, profile) = full_report(&m);
        let tree = GroupTree::from_group_paths(&[
            ("a1".into(), Some(vec!["Left".into()])),
            ("a2".into(), Some(vec!["Right".into()])),
            ("a3".into(), Some(vec!["Right".into()])),
        ])
        .unwrap();
        let groups = group_decomposition(&m, &tree, Side::In).unwrap();
        let bytes = write_report(&report, &profile, Some(&groups));
        let doc: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(doc["groups"]["side"], "in");
        assert_eq!(doc["groups"]["root"]["children"][1]["label"], "Right");
        assert_eq!(
            doc["groups"]["root"]["children"][1]["agent_count"]
                .as_u64()
                .unwrap(),
            2
        );
    }
}
