use anyhow::{bail, Result};
use clap::ValueEnum;
use maxaut_core::autos::{
    automorphism_count, quotient_check, table1_check, AutError, AutReport, CountOptions,
};
use maxaut_core::dessin::{verify_table3, DessinError};
use maxaut_core::oracle::{brute_automorphisms, mi_check, to_cayley, OracleError};
use maxaut_core::params::GroupParams;
use maxaut_core::structure::{check_third_term, verify_table2};
use serde::Serialize;
use serde_json::Value;

use crate::group_file::LoadedGroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    MaxAut,
    Table1,
    Table2,
    Table3,
    Quotient,
    Mi,
    All,
}

impl Which {
    const EACH: [Which; 6] = [
        Which::MaxAut,
        Which::Table1,
        Which::Table2,
        Which::Table3,
        Which::Quotient,
        Which::Mi,
    ];

    fn name(self) -> &'static str {
        match self {
            Which::MaxAut => "max-aut",
            Which::Table1 => "table1",
            Which::Table2 => "table2",
            Which::Table3 => "table3",
            Which::Quotient => "quotient",
            Which::Mi => "mi",
            Which::All => "all",
        }
    }

    /// Checks that only make sense for the class-three families.
    fn needs_class_three(self) -> bool {
        matches!(
            self,
            Which::Table1 | Which::Table2 | Which::Table3 | Which::Quotient
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub report: Value,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub params: GroupParams,
    pub consistent: bool,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

pub struct VerifyOptions {
    pub count: CountOptions,
    pub oracle_budget: usize,
    pub timings: bool,
}

/// A check that could not run because the group is over budget.
#[derive(Debug)]
pub struct BudgetExceeded(pub String);

impl std::fmt::Display for BudgetExceeded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for BudgetExceeded {}

fn pass_or_fail(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn result(check: Which, ok: bool, report: impl Serialize) -> CheckResult {
    CheckResult {
        check: check.name(),
        status: pass_or_fail(ok),
        reason: None,
        report: serde_json::to_value(report).expect("report serializes"),
    }
}

fn skipped(check: Which, reason: String) -> CheckResult {
    CheckResult {
        check: check.name(),
        status: Status::Skipped,
        reason: Some(reason),
        report: Value::Null,
    }
}

#[derive(Serialize)]
struct MaxAutCheck {
    #[serde(flatten)]
    count: AutReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_aut_count: Option<u64>,
}

fn run_max_aut(group: &LoadedGroup, opts: &VerifyOptions) -> Result<CheckResult> {
    let mut count = automorphism_count(&group.pres, opts.count)?.with_params(&group.params);
    if opts.timings {
        count = count.with_timing();
    } else {
        eprintln!(
            "max-aut: enumeration took {:.3}s",
            count.elapsed.as_secs_f64()
        );
    }
    let oracle = match to_cayley(&group.pres, opts.oracle_budget) {
        Ok(table) => Some(brute_automorphisms(&table)),
        Err(OracleError::ResourceBudgetExceeded { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let agrees = oracle.as_ref().is_none_or(|o| *o == count.aut_count);
    let ok = count.max_aut && agrees;
    let oracle_aut_count = oracle.map(|o| o.try_into().expect("oracle count fits in u64"));
    Ok(result(
        Which::MaxAut,
        ok,
        MaxAutCheck {
            count,
            oracle_aut_count,
        },
    ))
}

#[derive(Serialize)]
struct Table2Check {
    #[serde(flatten)]
    table: maxaut_core::structure::Table2Report,
    third_term: maxaut_core::structure::HomocyclicCheck,
}

fn run_one(check: Which, group: &LoadedGroup, opts: &VerifyOptions) -> Result<CheckResult> {
    let params = &group.params;
    Ok(match check {
        Which::MaxAut => run_max_aut(group, opts)?,
        Which::Table1 => {
            let report = table1_check(&group.pres);
            result(check, report.all_pass, report)
        }
        Which::Table2 => {
            let table = verify_table2(params)?;
            let third_term = check_third_term(&group.pres);
            let ok = table.table2_match && third_term.holds_with(params.p.pow(params.c()));
            result(check, ok, Table2Check { table, third_term })
        }
        Which::Table3 => {
            let report = verify_table3(params, &group.pres, opts.count.budget)?;
            result(check, report.table3_match, report)
        }
        Which::Quotient => {
            let report = quotient_check(params, opts.count)?;
            result(check, report.passed, report)
        }
        Which::Mi => {
            let table = to_cayley(&group.pres, opts.oracle_budget)?;
            let report = mi_check(&table, params.p)?;
            result(check, report.is_mi, report)
        }
        Which::All => unreachable!("expanded by the caller"),
    })
}

fn budget_message(err: &anyhow::Error) -> Option<String> {
    if let Some(AutError::ResourceBudgetExceeded { .. }) = err.downcast_ref() {
        return Some(err.to_string());
    }
    if let Some(DessinError::ResourceBudgetExceeded { .. }) = err.downcast_ref() {
        return Some(err.to_string());
    }
    if let Some(OracleError::ResourceBudgetExceeded { .. }) = err.downcast_ref() {
        return Some(err.to_string());
    }
    None
}

/// Runs the selected checks. With `all`, checks that do not apply to the
/// family and oracle checks over the oracle budget are reported as skipped;
/// a named check that cannot run is an error.
pub fn verify(group: &LoadedGroup, which: Which, opts: &VerifyOptions) -> Result<VerifyReport> {
    let selected: Vec<Which> = if which == Which::All {
        Which::EACH.to_vec()
    } else {
        vec![which]
    };
    let class_three = group.params.class() == 3;
    let mut checks = Vec::new();
    if group.consistent {
        for check in selected {
            if check.needs_class_three() && !class_three {
                if which == Which::All {
                    checks.push(skipped(
                        check,
                        format!("{} is not class three", group.params.family),
                    ));
                    continue;
                }
                bail!(maxaut_core::params::ParamsError::InvalidArgs(format!(
                    "{} applies only to class-three families",
                    check.name()
                )));
            }
            match run_one(check, group, opts) {
                Ok(r) => checks.push(r),
                Err(e) => match budget_message(&e) {
                    Some(msg) if which == Which::All && check == Which::Mi => {
                        checks.push(skipped(check, msg))
                    }
                    Some(msg) => return Err(BudgetExceeded(msg).into()),
                    None => return Err(e),
                },
            }
        }
    }
    let passed = group.consistent && checks.iter().all(|c| c.status != Status::Fail);
    Ok(VerifyReport {
        params: group.params,
        consistent: group.consistent,
        checks,
        passed,
    })
}
