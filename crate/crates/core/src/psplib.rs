//! Reader and writer for PSPLIB multi-mode (`.mm`) instance files and for
//! the companion tables of optimal or best-known makespans.
//!
//! PSPLIB numbers jobs `1..=J+2`; parsed instances use `0..=J+1`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::model::{Mode, ProjectInstance};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("declared {declared} jobs but {found} are listed")]
    InconsistentJobCount { declared: usize, found: usize },
    #[error("job {job} lists successor {successor}, outside 1..={jobs}")]
    DanglingSuccessor {
        job: usize,
        successor: usize,
        jobs: usize,
    },
    #[error("line {line}: mode row has {found} columns, expected {expected}")]
    BadModeRow {
        line: usize,
        expected: String,
        found: usize,
    },
    #[error("line {line}: {message}")]
    BadRow { line: usize, message: String },
    #[error("parsed instance is invalid: {0}")]
    InvalidInstance(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundsError {
    #[error("line {line}: duplicate entry for parameter {parameter}, instance {instance}")]
    DuplicateKey {
        line: usize,
        parameter: u32,
        instance: u32,
    },
    #[error("line {line}: makespan {value:?} is not a positive integer")]
    NonIntegerMakespan { line: usize, value: String },
    #[error("line {line}: expected at least three columns")]
    ShortRow { line: usize },
}

/// Raw contents of a `.mm` file, in file numbering (`1..=J+2`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawInstanceFile {
    pub job_count_including_dummies: usize,
    pub horizon: u32,
    pub renewable_count: usize,
    pub nonrenewable_count: usize,
    pub successors: Vec<Vec<usize>>,
    pub modes: Vec<Vec<Mode>>,
    pub renewable_availability: Vec<u32>,
    pub nonrenewable_availability: Vec<u32>,
}

impl RawInstanceFile {
    pub fn into_instance(self) -> ProjectInstance {
        let successors = self
            .successors
            .into_iter()
            .map(|s| s.into_iter().map(|j| j - 1).collect())
            .collect();
        ProjectInstance::from_successors(
            self.modes,
            successors,
            self.renewable_availability,
            self.nonrenewable_availability,
            self.horizon,
        )
    }
}

/// Best-known makespans keyed by `(parameter, instance)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundsTable {
    entries: BTreeMap<(u32, u32), u32>,
}

impl BoundsTable {
    pub fn get(&self, parameter: u32, instance: u32) -> Option<u32> {
        self.entries.get(&(parameter, instance)).copied()
    }

    pub fn insert(&mut self, parameter: u32, instance: u32, makespan: u32) -> Option<u32> {
        self.entries.insert((parameter, instance), makespan)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), u32)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Section {
    Header,
    Precedence,
    Requests,
    Availability,
}

fn banner(line: &str) -> Option<Section> {
    let t = line.trim_start();
    if t.starts_with("PRECEDENCE RELATIONS") {
        Some(Section::Precedence)
    } else if t.starts_with("REQUESTS/DURATIONS") {
        Some(Section::Requests)
    } else if t.starts_with("RESOURCEAVAILABILITIES") {
        Some(Section::Availability)
    } else {
        None
    }
}

fn header_value(line: &str) -> Option<u64> {
    let (_, rest) = line.split_once(':')?;
    rest.split_whitespace().next()?.parse().ok()
}

fn is_data_row(line: &str) -> bool {
    line.trim_start().starts_with(|c: char| c.is_ascii_digit())
}

fn numbers(line: &str, lineno: usize) -> Result<Vec<u64>, ParseError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse().map_err(|_| ParseError::BadRow {
                line: lineno,
                message: format!("{tok:?} is not a non-negative integer"),
            })
        })
        .collect()
}

fn to_u32(v: u64, line: usize) -> Result<u32, ParseError> {
    u32::try_from(v).map_err(|_| ParseError::BadRow {
        line,
        message: format!("{v} is out of range"),
    })
}

/// Parses a `.mm` file into its raw form without validating the instance.
pub fn parse_raw(text: &str) -> Result<RawInstanceFile, ParseError> {
    let mut section = Section::Header;
    let mut jobs = None;
    let mut horizon = None;
    let mut renewable = None;
    let mut nonrenewable = None;

    let mut declared_modes: Vec<usize> = Vec::new();
    let mut successors: Vec<Vec<usize>> = Vec::new();
    let mut modes: Vec<Vec<Mode>> = Vec::new();
    let mut availability: Option<Vec<u64>> = None;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if let Some(next) = banner(line) {
            if next <= section {
                return Err(ParseError::MalformedHeader(format!(
                    "line {lineno}: section {next:?} out of order"
                )));
            }
            if next > Section::Precedence && section < Section::Precedence {
                return Err(ParseError::MalformedHeader(
                    "missing PRECEDENCE RELATIONS section".into(),
                ));
            }
            if next == Section::Availability && section < Section::Requests {
                return Err(ParseError::MalformedHeader(
                    "missing REQUESTS/DURATIONS section".into(),
                ));
            }
            if next == Section::Precedence
                && (jobs.is_none() || renewable.is_none() || nonrenewable.is_none())
            {
                return Err(ParseError::MalformedHeader(
                    "job or resource counts missing before PRECEDENCE RELATIONS".into(),
                ));
            }
            section = next;
            continue;
        }
        match section {
            Section::Header => {
                let t = line.trim_start();
                if t.starts_with("jobs") {
                    jobs = header_value(t).map(|v| v as usize);
                } else if t.starts_with("horizon") {
                    horizon = header_value(t);
                } else if t.starts_with("- renewable") {
                    renewable = header_value(t).map(|v| v as usize);
                } else if t.starts_with("- nonrenewable") {
                    nonrenewable = header_value(t).map(|v| v as usize);
                } else if t.starts_with("- doubly constrained") && header_value(t).unwrap_or(0) > 0
                {
                    return Err(ParseError::MalformedHeader(
                        "doubly constrained resources are not supported".into(),
                    ));
                }
            }
            Section::Precedence => {
                if !is_data_row(line) {
                    continue;
                }
                let row = numbers(line, lineno)?;
                if row.len() < 3 || row.len() != 3 + row[2] as usize {
                    return Err(ParseError::BadRow {
                        line: lineno,
                        message: "precedence row does not match its successor count".into(),
                    });
                }
                let job = row[0] as usize;
                if job != successors.len() + 1 {
                    return Err(ParseError::BadRow {
                        line: lineno,
                        message: format!("expected job {}, found {job}", successors.len() + 1),
                    });
                }
                declared_modes.push(row[1] as usize);
                successors.push(row[3..].iter().map(|&s| s as usize).collect());
            }
            Section::Requests => {
                if !is_data_row(line) {
                    continue;
                }
                let (r, n) = (renewable.unwrap_or(0), nonrenewable.unwrap_or(0));
                let row = numbers(line, lineno)?;
                let values = if row.len() == 3 + r + n {
                    let job = row[0] as usize;
                    if job != modes.len() + 1 {
                        return Err(ParseError::BadRow {
                            line: lineno,
                            message: format!("expected job {}, found {job}", modes.len() + 1),
                        });
                    }
                    modes.push(Vec::new());
                    &row[1..]
                } else if row.len() == 2 + r + n && !modes.is_empty() {
                    &row[..]
                } else {
                    return Err(ParseError::BadModeRow {
                        line: lineno,
                        expected: format!("{} or {}", 3 + r + n, 2 + r + n),
                        found: row.len(),
                    });
                };
                let current = modes.last_mut().unwrap();
                if values[0] as usize != current.len() + 1 {
                    return Err(ParseError::BadRow {
                        line: lineno,
                        message: format!(
                            "expected mode {}, found {}",
                            current.len() + 1,
                            values[0]
                        ),
                    });
                }
                let duration = to_u32(values[1], lineno)?;
                let req = values[2..]
                    .iter()
                    .map(|&v| to_u32(v, lineno))
                    .collect::<Result<Vec<_>, _>>()?;
                current.push(Mode::new(duration, req[..r].to_vec(), req[r..].to_vec()));
            }
            Section::Availability => {
                if !is_data_row(line) || availability.is_some() {
                    continue;
                }
                availability = Some(numbers(line, lineno)?);
            }
        }
    }

    if section < Section::Availability {
        let missing = match section {
            Section::Header => "PRECEDENCE RELATIONS",
            Section::Precedence => "REQUESTS/DURATIONS",
            _ => "RESOURCEAVAILABILITIES",
        };
        return Err(ParseError::MalformedHeader(format!("missing {missing} section")));
    }
    let jobs = jobs.ok_or_else(|| ParseError::MalformedHeader("missing job count".into()))?;
    let horizon = horizon
        .ok_or_else(|| ParseError::MalformedHeader("missing horizon".into()))
        .and_then(|h| to_u32(h, 0))?;
    let (r, n) = (renewable.unwrap_or(0), nonrenewable.unwrap_or(0));

    if successors.len() != jobs {
        return Err(ParseError::InconsistentJobCount {
            declared: jobs,
            found: successors.len(),
        });
    }
    if modes.len() != jobs {
        return Err(ParseError::InconsistentJobCount {
            declared: jobs,
            found: modes.len(),
        });
    }
    for (j, succ) in successors.iter().enumerate() {
        if let Some(&s) = succ.iter().find(|&&s| s == 0 || s > jobs) {
            return Err(ParseError::DanglingSuccessor {
                job: j + 1,
                successor: s,
                jobs,
            });
        }
    }
    for (j, (declared, listed)) in declared_modes.iter().zip(&modes).enumerate() {
        if *declared != listed.len() {
            return Err(ParseError::BadRow {
                line: 0,
                message: format!(
                    "job {} declares {declared} modes but lists {}",
                    j + 1,
                    listed.len()
                ),
            });
        }
    }
    let availability =
        availability.ok_or_else(|| ParseError::MalformedHeader("missing availabilities".into()))?;
    if availability.len() != r + n {
        return Err(ParseError::BadRow {
            line: 0,
            message: format!(
                "{} resource availabilities for {} resources",
                availability.len(),
                r + n
            ),
        });
    }
    let availability = availability
        .into_iter()
        .map(|v| to_u32(v, 0))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(RawInstanceFile {
        job_count_including_dummies: jobs,
        horizon,
        renewable_count: r,
        nonrenewable_count: n,
        successors,
        modes,
        renewable_availability: availability[..r].to_vec(),
        nonrenewable_availability: availability[r..].to_vec(),
    })
}

/// Parses a `.mm` file and validates the resulting instance.
pub fn parse_instance(text: &str) -> Result<ProjectInstance, ParseError> {
    let instance = parse_raw(text)?.into_instance();
    let violations = instance.validate();
    if violations.is_empty() {
        Ok(instance)
    } else {
        let msg = violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ");
        Err(ParseError::InvalidInstance(msg))
    }
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<ProjectInstance, ParseError> {
    parse_instance(&std::fs::read_to_string(path)?)
}

/// Parses a whitespace-delimited table of `parameter instance makespan`
/// rows. Lines not starting with a digit are headers or comments; columns
/// past the third are ignored.
pub fn parse_bounds_table(text: &str) -> Result<BoundsTable, BoundsError> {
    let mut table = BoundsTable::default();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if !is_data_row(line) {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() < 3 {
            return Err(BoundsError::ShortRow { line: lineno });
        }
        let key = |s: &str| {
            s.parse::<u32>().map_err(|_| BoundsError::NonIntegerMakespan {
                line: lineno,
                value: s.to_string(),
            })
        };
        let (parameter, instance) = (key(cols[0])?, key(cols[1])?);
        let makespan = cols[2]
            .parse::<u32>()
            .ok()
            .filter(|&m| m > 0)
            .ok_or_else(|| BoundsError::NonIntegerMakespan {
                line: lineno,
                value: cols[2].to_string(),
            })?;
        if table.insert(parameter, instance, makespan).is_some() {
            return Err(BoundsError::DuplicateKey {
                line: lineno,
                parameter,
                instance,
            });
        }
    }
    Ok(table)
}

/// Writes a bounds table in the layout read by [`parse_bounds_table`].
pub fn write_bounds_table(table: &BoundsTable) -> String {
    let mut out = String::from("Parameter  Instance  Makespan\n");
    for ((p, i), m) in table.iter() {
        let _ = writeln!(out, "{p:>9} {i:>9} {m:>9}");
    }
    out
}

const RULE: &str =
    "************************************************************************";

/// Emits `instance` in PSPLIB `.mm` layout.
pub fn write_instance(instance: &ProjectInstance) -> String {
    let jobs = instance.activities.len();
    let (r, n) = (instance.renewable_count(), instance.nonrenewable_count());
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "{RULE}");
    let _ = writeln!(w, "file with basedata            : generated");
    let _ = writeln!(w, "initial value random generator: 0");
    let _ = writeln!(w, "{RULE}");
    let _ = writeln!(w, "projects                      :  1");
    let _ = writeln!(w, "jobs (incl. supersource/sink ):  {jobs}");
    let _ = writeln!(w, "horizon                       :  {}", instance.horizon);
    let _ = writeln!(w, "RESOURCES");
    let _ = writeln!(w, "  - renewable                 :  {r}   R");
    let _ = writeln!(w, "  - nonrenewable              :  {n}   N");
    let _ = writeln!(w, "  - doubly constrained        :  0   D");
    let _ = writeln!(w, "{RULE}");
    let _ = writeln!(w, "PROJECT INFORMATION:");
    let _ = writeln!(w, "pronr.  #jobs rel.date duedate tardcost  MPM-Time");
    let _ = writeln!(
        w,
        "    1{:>7}      0{:>8}        0{:>10}",
        instance.job_count(),
        instance.horizon,
        instance.horizon
    );
    let _ = writeln!(w, "{RULE}");
    let _ = writeln!(w, "PRECEDENCE RELATIONS:");
    let _ = writeln!(w, "jobnr.    #modes  #successors   successors");
    for (j, act) in instance.activities.iter().enumerate() {
        let _ = write!(w, "{:>4}{:>10}{:>11}   ", j + 1, act.modes.len(), act.successors.len());
        for s in &act.successors {
            let _ = write!(w, "{:>4}", s + 1);
        }
        let _ = writeln!(w);
    }
    let _ = writeln!(w, "{RULE}");
    let _ = writeln!(w, "REQUESTS/DURATIONS:");
    let mut head = String::from("jobnr. mode duration");
    for k in 1..=r {
        let _ = write!(head, "  R{k:>2}");
    }
    for l in 1..=n {
        let _ = write!(head, "  N{l:>2}");
    }
    let _ = writeln!(w, "{head}");
    let _ = writeln!(w, "{}", "-".repeat(72));
    for (j, act) in instance.activities.iter().enumerate() {
        for (m, mode) in act.modes.iter().enumerate() {
            if m == 0 {
                let _ = write!(w, "{:>3}", j + 1);
            } else {
                let _ = write!(w, "   ");
            }
            let _ = write!(w, "{:>8}{:>9}", m + 1, mode.duration);
            for q in mode.renewable.iter().chain(&mode.nonrenewable) {
                let _ = write!(w, "{q:>5}");
            }
            let _ = writeln!(w);
        }
    }
    let _ = writeln!(w, "{RULE}");
    let _ = writeln!(w, "RESOURCEAVAILABILITIES:");
    let mut head = String::new();
    for k in 1..=r {
        let _ = write!(head, "  R{k:>2}");
    }
    for l in 1..=n {
        let _ = write!(head, "  N{l:>2}");
    }
    let _ = writeln!(w, "{head}");
    let mut row = String::new();
    for q in instance
        .renewable_capacity
        .iter()
        .chain(&instance.nonrenewable_capacity)
    {
        let _ = write!(row, "{q:>5}");
    }
    let _ = writeln!(w, "{row}");
    let _ = writeln!(w, "{RULE}");
    out
}
