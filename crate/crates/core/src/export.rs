//! JSON and CSV documents. Exact values are always written as `p/q` strings.

use serde::Serialize;

use crate::analysis::{ChainAnalysis, StageSummary};
use crate::chain::{Chain, StageMatrices};
use crate::error::{Error, Result};
use crate::linalg::{format_rational, Rational, RationalMatrix};
use crate::partition::{weight_vector, StageSpace};
use crate::simulate::{ComparisonTable, SimulationReport};
use crate::verify::VerificationReport;

fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("documents serialize");
    out.push('\n');
    out
}

fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
    writer.write_record(header).map_err(io)?;
    for row in rows {
        writer.write_record(&row).map_err(io)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Serialize)]
struct StageDoc {
    t: u32,
    states: Vec<String>,
    landing: Vec<String>,
    e: Option<String>,
}

#[derive(Serialize)]
struct AnalysisDoc {
    n: u32,
    stages: Vec<StageDoc>,
    total: String,
    variance: String,
}

pub fn analysis_json(analysis: &ChainAnalysis) -> String {
    to_json(&AnalysisDoc {
        n: analysis.n,
        stages: analysis
            .stages
            .iter()
            .map(|s| StageDoc {
                t: s.t,
                states: s.states.iter().map(|p| p.part_list()).collect(),
                landing: strings(&s.landing),
                e: s.expected_time.as_ref().map(format_rational),
            })
            .collect(),
        total: format_rational(&analysis.total_time),
        variance: format_rational(&analysis.variance),
    })
}

/// One row per stage; states and landing probabilities are space separated.
pub fn analysis_csv(analysis: &ChainAnalysis) -> Result<String> {
    to_csv(
        &["t", "states", "landing", "e"],
        analysis.stages.iter().map(|s| {
            vec![
                s.t.to_string(),
                s.states
                    .iter()
                    .map(|p| p.part_list())
                    .collect::<Vec<_>>()
                    .join(" "),
                strings(&s.landing).join(" "),
                s.expected_time
                    .as_ref()
                    .map(format_rational)
                    .unwrap_or_default(),
            ]
        }),
    )
}

#[derive(Serialize)]
struct LandingStageDoc {
    t: u32,
    states: Vec<String>,
    landing: Vec<String>,
}

#[derive(Serialize)]
struct LandingDoc {
    n: u32,
    stages: Vec<LandingStageDoc>,
}

fn selected(analysis: &ChainAnalysis, t: Option<u32>) -> impl Iterator<Item = &StageSummary> {
    analysis
        .stages
        .iter()
        .filter(move |s| t.is_none_or(|t| s.t == t))
}

/// Landing vectors for every stage, or only stage `t`.
pub fn landing_json(analysis: &ChainAnalysis, t: Option<u32>) -> String {
    to_json(&LandingDoc {
        n: analysis.n,
        stages: selected(analysis, t)
            .map(|s| LandingStageDoc {
                t: s.t,
                states: s.states.iter().map(|p| p.part_list()).collect(),
                landing: strings(&s.landing),
            })
            .collect(),
    })
}

pub fn landing_csv(analysis: &ChainAnalysis, t: Option<u32>) -> Result<String> {
    to_csv(
        &["t", "state", "probability"],
        selected(analysis, t).flat_map(|s| {
            s.states
                .iter()
                .zip(&s.landing)
                .map(move |(state, p)| vec![s.t.to_string(), state.part_list(), format_rational(p)])
        }),
    )
}

#[derive(Serialize)]
struct StageTimeDoc {
    t: u32,
    e: String,
}

#[derive(Serialize)]
struct TimesDoc {
    n: u32,
    stages: Vec<StageTimeDoc>,
    total: String,
}

/// Expected steps `e_{t,t-1}` for `t = n .. 2` and their sum.
pub fn times_json(analysis: &ChainAnalysis) -> String {
    to_json(&TimesDoc {
        n: analysis.n,
        stages: analysis
            .stage_times()
            .into_iter()
            .map(|(t, e)| StageTimeDoc {
                t,
                e: format_rational(&e),
            })
            .collect(),
        total: format_rational(&analysis.total_time),
    })
}

pub fn times_csv(analysis: &ChainAnalysis) -> Result<String> {
    to_csv(
        &["t", "e"],
        analysis
            .stage_times()
            .into_iter()
            .map(|(t, e)| vec![t.to_string(), format_rational(&e)])
            .chain(std::iter::once(vec![
                "total".into(),
                format_rational(&analysis.total_time),
            ])),
    )
}

#[derive(Serialize)]
struct VarianceDoc {
    n: u32,
    mean: String,
    variance: String,
}

pub fn variance_json(analysis: &ChainAnalysis) -> String {
    to_json(&VarianceDoc {
        n: analysis.n,
        mean: format_rational(&analysis.total_time),
        variance: format_rational(&analysis.variance),
    })
}

pub fn variance_csv(analysis: &ChainAnalysis) -> Result<String> {
    to_csv(
        &["n", "mean", "variance"],
        [vec![
            analysis.n.to_string(),
            format_rational(&analysis.total_time),
            format_rational(&analysis.variance),
        ]],
    )
}

#[derive(Serialize)]
struct StateDoc {
    parts: String,
    vector: String,
    multinomial: String,
}

#[derive(Serialize)]
struct StageSpaceDoc {
    t: u32,
    states: Vec<StateDoc>,
    weight_sum: String,
}

#[derive(Serialize)]
struct EnumerationDoc {
    n: u32,
    stages: Vec<StageSpaceDoc>,
}

pub fn enumeration_json(n: u32, spaces: &[StageSpace]) -> String {
    to_json(&EnumerationDoc {
        n,
        stages: spaces
            .iter()
            .map(|space| StageSpaceDoc {
                t: space.t(),
                states: space
                    .states()
                    .iter()
                    .map(|p| StateDoc {
                        parts: p.part_list(),
                        vector: p.vector_notation(),
                        multinomial: p.multinomial().to_string(),
                    })
                    .collect(),
                weight_sum: weight_vector(space).sum().to_string(),
            })
            .collect(),
    })
}

pub fn enumeration_csv(spaces: &[StageSpace]) -> Result<String> {
    to_csv(
        &["t", "parts", "vector", "multinomial"],
        spaces.iter().flat_map(|space| {
            space.states().iter().map(move |p| {
                vec![
                    space.t().to_string(),
                    p.part_list(),
                    p.vector_notation(),
                    p.multinomial().to_string(),
                ]
            })
        }),
    )
}

/// A labeled matrix: rows and columns carry part-list labels.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixDump {
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u32>,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

impl MatrixDump {
    fn new(
        n: u32,
        t: Option<u32>,
        rows: Vec<String>,
        cols: Vec<String>,
        m: &RationalMatrix,
    ) -> Self {
        MatrixDump {
            n,
            t,
            rows,
            cols,
            entries: (0..m.rows()).map(|i| strings(m.row(i))).collect(),
        }
    }

    /// `[A_t | A_{t,t-1}]` for one stage.
    pub fn stage(stage: &StageMatrices) -> Self {
        Self::new(
            stage.n,
            Some(stage.t),
            stage.space.labels(),
            stage.column_labels(),
            &stage.combined(),
        )
    }

    /// The full transition matrix `P`.
    pub fn full(chain: &Chain) -> Self {
        let labels: Vec<String> = chain.states().iter().map(|p| p.part_list()).collect();
        Self::new(chain.n, None, labels.clone(), labels, &chain.full_matrix())
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Header row of column labels; each row starts with its own label.
    pub fn to_csv(&self) -> Result<String> {
        let mut header = vec![""];
        header.extend(self.cols.iter().map(String::as_str));
        to_csv(
            &header,
            self.rows.iter().zip(&self.entries).map(|(label, row)| {
                let mut record = vec![label.clone()];
                record.extend(row.iter().cloned());
                record
            }),
        )
    }
}

#[derive(Serialize)]
struct WinsDoc {
    n: u32,
    x: Vec<String>,
    total: String,
}

/// `x_1 .. x_{n-1}` and the implied total `n · x_1`.
pub fn wins_json(n: u32, x: &[Rational]) -> String {
    to_json(&WinsDoc {
        n,
        x: strings(x),
        total: format_rational(&(Rational::from_integer(n.into()) * &x[0])),
    })
}

pub fn wins_csv(x: &[Rational]) -> Result<String> {
    to_csv(
        &["i", "x_i"],
        x.iter()
            .enumerate()
            .map(|(k, v)| vec![(k + 1).to_string(), format_rational(v)]),
    )
}

#[derive(Serialize)]
struct SimStageDoc {
    t: u32,
    states: Vec<String>,
    landing_counts: Vec<u64>,
    landing_frequencies: Vec<f64>,
    landing_std_errors: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_time_std_error: Option<f64>,
}

#[derive(Serialize)]
struct SimulationDoc {
    n: u32,
    trials: u64,
    seed: u64,
    stages: Vec<SimStageDoc>,
    total_mean: f64,
    total_mean_std_error: f64,
    total_variance: f64,
    total_variance_std_error: f64,
}

#[derive(Serialize)]
struct ComparisonRowDoc {
    quantity: String,
    exact: String,
    empirical: f64,
    std_error: f64,
    z: Option<f64>,
    flagged: bool,
}

#[derive(Serialize)]
struct ComparisonDoc {
    z_threshold: f64,
    passed: bool,
    rows: Vec<ComparisonRowDoc>,
}

#[derive(Serialize)]
struct SimulateCommandDoc {
    report: SimulationDoc,
    comparison: ComparisonDoc,
}

fn simulation_doc(report: &SimulationReport) -> SimulationDoc {
    SimulationDoc {
        n: report.n,
        trials: report.trials,
        seed: report.master_seed,
        stages: report
            .stages
            .iter()
            .map(|s| SimStageDoc {
                t: s.t,
                states: s.states.iter().map(|p| p.part_list()).collect(),
                landing_counts: s.landing_counts.clone(),
                landing_frequencies: report.landing_frequencies(s.t).unwrap_or_default(),
                landing_std_errors: report.landing_std_errors(s.t).unwrap_or_default(),
                mean_time: report.stage_mean(s.t),
                mean_time_std_error: report.stage_std_error(s.t),
            })
            .collect(),
        total_mean: report.total_mean(),
        total_mean_std_error: report.total_mean_std_error(),
        total_variance: report.total_variance(),
        total_variance_std_error: report.total_variance_std_error(),
    }
}

fn comparison_doc(table: &ComparisonTable) -> ComparisonDoc {
    ComparisonDoc {
        z_threshold: table.threshold,
        passed: table.passed(),
        rows: table
            .rows
            .iter()
            .map(|r| ComparisonRowDoc {
                quantity: r.quantity.clone(),
                exact: format_rational(&r.exact),
                empirical: r.empirical,
                std_error: r.std_error,
                // JSON has no infinities
                z: r.z.is_finite().then_some(r.z),
                flagged: r.flagged,
            })
            .collect(),
    }
}

pub fn simulation_json(report: &SimulationReport, table: &ComparisonTable) -> String {
    to_json(&SimulateCommandDoc {
        report: simulation_doc(report),
        comparison: comparison_doc(table),
    })
}

pub fn comparison_csv(table: &ComparisonTable) -> Result<String> {
    to_csv(
        &[
            "quantity",
            "exact",
            "empirical",
            "std_error",
            "z",
            "flagged",
        ],
        table.rows.iter().map(|r| {
            vec![
                r.quantity.clone(),
                format_rational(&r.exact),
                r.empirical.to_string(),
                r.std_error.to_string(),
                r.z.to_string(),
                r.flagged.to_string(),
            ]
        }),
    )
}

#[derive(Serialize)]
struct CheckDoc<'a> {
    name: &'a str,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<&'a str>,
}

#[derive(Serialize)]
struct VerificationDoc<'a> {
    n: u32,
    passed: bool,
    checks: Vec<CheckDoc<'a>>,
}

pub fn verification_json(reports: &[VerificationReport]) -> String {
    let docs: Vec<VerificationDoc> = reports
        .iter()
        .map(|r| VerificationDoc {
            n: r.n,
            passed: r.passed(),
            checks: r
                .checks
                .iter()
                .map(|c| CheckDoc {
                    name: c.name,
                    passed: c.passed,
                    detail: c.detail.as_deref(),
                })
                .collect(),
        })
        .collect();
    to_json(&docs)
}

pub fn verification_csv(reports: &[VerificationReport]) -> Result<String> {
    to_csv(
        &["n", "check", "passed", "detail"],
        reports.iter().flat_map(|r| {
            r.checks.iter().map(move |c| {
                vec![
                    r.n.to_string(),
                    c.name.to_string(),
                    c.passed.to_string(),
                    c.detail.clone().unwrap_or_default(),
                ]
            })
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_full_chain, build_stage};
    use crate::partition::SizeCap;

    #[test]
    fn analysis_json_shape() {
        let analysis = ChainAnalysis::compute(4, SizeCap::default()).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&analysis_json(&analysis)).unwrap();
        assert_eq!(doc["n"], 4);
        assert_eq!(doc["total"], "9");
        assert_eq!(doc["variance"], "32");
        assert_eq!(doc["stages"][2]["t"], 2);
        assert_eq!(
            doc["stages"][2]["landing"],
            serde_json::json!(["1/3", "2/3"])
        );
        assert_eq!(doc["stages"][2]["e"], "6");
        assert!(doc["stages"][3]["e"].is_null());
    }

    #[test]
    fn analysis_csv_rows() {
        let analysis = ChainAnalysis::compute(4, SizeCap::default()).unwrap();
        let csv = analysis_csv(&analysis).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,states,landing,e");
        assert_eq!(lines[3], "2,[22] [31],1/3 2/3,6");
        assert_eq!(lines[4], "1,[4],1,");
    }

    #[test]
    fn matrix_csv_uses_partition_labels() {
        let dump = MatrixDump::stage(&build_stage(4, 2, SizeCap::default()).unwrap());
        let csv = dump.to_csv().unwrap();
        assert_eq!(csv, ",[22],[31],[4]\n[22],1/3,2/3,0\n[31],1/4,1/2,1/4\n");
        let full = MatrixDump::full(&build_full_chain(3, SizeCap::default()).unwrap());
        assert_eq!(full.rows, ["[111]", "[21]", "[3]"]);
        let json: serde_json::Value = serde_json::from_str(&full.to_json()).unwrap();
        assert!(json.get("t").is_none());
        assert_eq!(json["entries"][1], serde_json::json!(["0", "2/3", "1/3"]));
    }

    #[test]
    fn wide_labels_are_quoted_in_csv() {
        let dump = MatrixDump::stage(&build_stage(10, 2, SizeCap::default()).unwrap());
        let csv = dump.to_csv().unwrap();
        assert!(csv.contains("\"[10,]\""));
    }

    #[test]
    fn wins_documents() {
        let x = crate::symmetric::expected_wins(4).unwrap();
        assert_eq!(wins_csv(&x).unwrap(), "i,x_i\n1,9/4\n2,7/2\n3,13/4\n");
        let doc: serde_json::Value = serde_json::from_str(&wins_json(4, &x)).unwrap();
        assert_eq!(doc["total"], "9");
    }

    #[test]
    fn times_and_variance_documents() {
        let analysis = ChainAnalysis::compute(5, SizeCap::default()).unwrap();
        assert_eq!(
            times_csv(&analysis).unwrap(),
            "t,e\n5,1\n4,5/3\n3,10/3\n2,10\ntotal,16\n"
        );
        let doc: serde_json::Value = serde_json::from_str(&times_json(&analysis)).unwrap();
        assert_eq!(doc["total"], "16");
        assert_eq!(doc["stages"][1]["e"], "5/3");
        let six = ChainAnalysis::compute(6, SizeCap::default()).unwrap();
        assert_eq!(variance_csv(&six).unwrap(), "n,mean,variance\n6,25,469/2\n");
    }

    #[test]
    fn landing_documents_filter_by_stage() {
        let analysis = ChainAnalysis::compute(4, SizeCap::default()).unwrap();
        assert_eq!(
            landing_csv(&analysis, Some(2)).unwrap(),
            "t,state,probability\n2,[22],1/3\n2,[31],2/3\n"
        );
        let doc: serde_json::Value = serde_json::from_str(&landing_json(&analysis, None)).unwrap();
        assert_eq!(doc["stages"].as_array().unwrap().len(), 4);
    }
}
