use crate::error::{Error, Result};

/// One iteration record. `step_size` is the projection residual magnitude for
/// RK-type updates (zero when a projection was rejected) and the signed step
/// length gamma for SGD-type updates.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    /// ||x_k - x_star|| / ||x_0 - x_star||; absent when x_star is unknown.
    pub relative_error: Option<f64>,
    pub step_size: f64,
    /// Whether the gated projection ran (quantile-rk only).
    pub accepted: Option<bool>,
    /// The quantile value used this iteration (quantile methods only).
    pub threshold: Option<f64>,
}

/// Full per-iteration history of a solve run. Row 0 describes the starting
/// iterate; early stopping truncates the tail.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationTrace {
    pub rows: Vec<TraceRow>,
}

pub const TRACE_CSV_HEADER: &str = "iteration,relative_error,step_size,accepted,threshold";

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn final_relative_error(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.relative_error)
    }

    /// Relative errors indexed by iteration; empty when x_star was unknown.
    pub fn relative_errors(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.relative_error).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 48 + 64);
        out.push_str(TRACE_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},", r.iteration));
            if let Some(e) = r.relative_error {
                out.push_str(&format!("{e}"));
            }
            out.push_str(&format!(",{},", r.step_size));
            match r.accepted {
                Some(true) => out.push('1'),
                Some(false) => out.push('0'),
                None => {}
            }
            out.push(',');
            if let Some(t) = r.threshold {
                out.push_str(&format!("{t}"));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the exact format `to_csv` writes; used to re-fit rates from
    /// files without keeping runs alive.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == TRACE_CSV_HEADER => {}
            _ => {
                return Err(Error::Parse {
                    path: "<trace>".into(),
                    line: 1,
                    reason: format!("expected header '{TRACE_CSV_HEADER}'"),
                })
            }
        }
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let fields: Vec<&str> = t.split(',').collect();
            if fields.len() != 5 {
                return Err(Error::Parse {
                    path: "<trace>".into(),
                    line: idx + 1,
                    reason: format!("expected 5 fields, got {}", fields.len()),
                });
            }
            let parse_f64 = |s: &str, what: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    path: "<trace>".into(),
                    line: idx + 1,
                    reason: format!("bad {what}: {e}"),
                })
            };
            let iteration = fields[0].parse::<usize>().map_err(|e| Error::Parse {
                path: "<trace>".into(),
                line: idx + 1,
                reason: format!("bad iteration: {e}"),
            })?;
            let relative_error = if fields[1].is_empty() {
                None
            } else {
                Some(parse_f64(fields[1], "relative_error")?)
            };
            let step_size = parse_f64(fields[2], "step_size")?;
            let accepted = match fields[3] {
                "" => None,
                "1" => Some(true),
                "0" => Some(false),
                other => {
                    return Err(Error::Parse {
                        path: "<trace>".into(),
                        line: idx + 1,
                        reason: format!("bad accepted flag '{other}'"),
                    })
                }
            };
            let threshold = if fields[4].is_empty() {
                None
            } else {
                Some(parse_f64(fields[4], "threshold")?)
            };
            rows.push(TraceRow {
                iteration,
                relative_error,
                step_size,
                accepted,
                threshold,
            });
        }
        Ok(IterationTrace { rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_preserves_every_field() {
        let trace = IterationTrace {
            rows: vec![
                TraceRow {
                    iteration: 0,
                    relative_error: Some(1.0),
                    step_size: 0.0,
                    accepted: None,
                    threshold: None,
                },
                TraceRow {
                    iteration: 1,
                    relative_error: Some(0.1234567890123456789),
                    step_size: 2.5e-13,
                    accepted: Some(false),
                    threshold: Some(0.75),
                },
                TraceRow {
                    iteration: 2,
                    relative_error: None,
                    step_size: 1.0,
                    accepted: Some(true),
                    threshold: Some(3.0),
                },
            ],
        };
        let text = trace.to_csv();
        assert!(text.starts_with(TRACE_CSV_HEADER));
        let back = IterationTrace::from_csv(&text).unwrap();
        assert_eq!(trace, back);
    }

    #[test]
    fn csv_rejects_missing_header_and_bad_rows() {
        assert!(IterationTrace::from_csv("nope\n1,2,3,4,5\n").is_err());
        let bad = format!("{TRACE_CSV_HEADER}\n0,1.0,0.0,maybe,\n");
        assert!(IterationTrace::from_csv(&bad).is_err());
        let short = format!("{TRACE_CSV_HEADER}\n0,1.0\n");
        assert!(IterationTrace::from_csv(&short).is_err());
    }
}
