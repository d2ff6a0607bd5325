//! Line-oriented dataset files.
//!
//! ```text
//! EXBMDP v1 agent=A H=3 obslen=4 n=2 labeled=1
//! 0110 1001 0000 | 0 1 1
//! 0100 1011 0010 | 0 0 1
//! ```
//!
//! One header line, then exactly `n` trajectory lines of `H` observation
//! tokens (contiguous `0`/`1` strings of length `obslen`). When `labeled=1`
//! each line continues with `|` and `H` latent labels.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::dataset::{Agent, Trajectory, TrajectoryDataset};
use crate::bits::Bits;
use crate::error::{Error, Result};

const MAGIC: &str = "EXBMDP";
const VERSION: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub agent: Agent,
    pub horizon: usize,
    pub obs_len: usize,
    pub n: usize,
    pub labeled: bool,
}

impl Header {
    pub fn render(&self) -> String {
        format!(
            "{MAGIC} {VERSION} agent={} H={} obslen={} n={} labeled={}",
            self.agent,
            self.horizon,
            self.obs_len,
            self.n,
            u8::from(self.labeled)
        )
    }
}

pub fn parse_header(line: &str) -> Result<Header> {
    let err = |m: String| Error::parse(1, m);
    let mut tokens = line.split_ascii_whitespace();
    if tokens.next() != Some(MAGIC) {
        return Err(err(format!("expected `{MAGIC}` magic")));
    }
    if tokens.next() != Some(VERSION) {
        return Err(err(format!("unsupported version, expected `{VERSION}`")));
    }
    let mut field = |key: &str| -> Result<String> {
        let tok = tokens.next().ok_or_else(|| err(format!("missing `{key}=` field")))?;
        tok.strip_prefix(key)
            .and_then(|t| t.strip_prefix('='))
            .map(str::to_owned)
            .ok_or_else(|| err(format!("expected `{key}=...`, found `{tok}`")))
    };
    let agent: Agent = field("agent")?
        .parse()
        .map_err(|_| err("agent must be A or B".into()))?;
    let int = |key: &str, v: String| -> Result<usize> {
        v.parse()
            .map_err(|_| err(format!("`{key}` must be a non-negative integer, found `{v}`")))
    };
    let horizon = int("H", field("H")?)?;
    let obs_len = int("obslen", field("obslen")?)?;
    let n = int("n", field("n")?)?;
    let labeled = match field("labeled")?.as_str() {
        "0" => false,
        "1" => true,
        other => return Err(err(format!("labeled must be 0 or 1, found `{other}`"))),
    };
    if tokens.next().is_some() {
        return Err(err("trailing tokens after header".into()));
    }
    if horizon == 0 {
        return Err(err("H must be positive".into()));
    }
    Ok(Header {
        agent,
        horizon,
        obs_len,
        n,
        labeled,
    })
}

fn parse_trajectory(line: &str, lineno: usize, header: &Header) -> Result<Trajectory> {
    let (obs_part, label_part) = match line.split_once('|') {
        Some((o, l)) => (o, Some(l)),
        None => (line, None),
    };
    let observations = obs_part
        .split_ascii_whitespace()
        .enumerate()
        .map(|(t, tok)| {
            if tok.len() != header.obs_len {
                return Err(Error::parse(
                    lineno,
                    format!("observation {t} has width {}, expected {}", tok.len(), header.obs_len),
                ));
            }
            Bits::parse_01(tok)
                .ok_or_else(|| Error::parse(lineno, format!("observation {t} contains a byte other than 0/1")))
        })
        .collect::<Result<Vec<_>>>()?;
    if observations.len() != header.horizon {
        return Err(Error::parse(
            lineno,
            format!("expected {} observations, found {}", header.horizon, observations.len()),
        ));
    }
    let labels = match (header.labeled, label_part) {
        (false, None) => None,
        (false, Some(_)) => return Err(Error::parse(lineno, "labels present in an unlabeled file")),
        (true, None) => return Err(Error::parse(lineno, "missing `|` and latent labels")),
        (true, Some(part)) => {
            let labels = part
                .split_ascii_whitespace()
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| Error::parse(lineno, format!("invalid latent label `{tok}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            if labels.len() != header.horizon {
                return Err(Error::parse(
                    lineno,
                    format!("expected {} labels, found {}", header.horizon, labels.len()),
                ));
            }
            Some(labels)
        }
    };
    Ok(Trajectory { observations, labels })
}

/// Parses a whole dataset file from text.
pub fn parse_dataset(text: &str) -> Result<TrajectoryDataset> {
    read_dataset(text.as_bytes())
}

pub fn read_dataset<R: BufRead>(reader: R) -> Result<TrajectoryDataset> {
    let mut lines = reader.lines();
    let header_line = lines.next().ok_or_else(|| Error::parse(1, "empty file"))??;
    let header = parse_header(&header_line)?;
    let mut trajectories = Vec::with_capacity(header.n.min(1 << 20));
    let mut lineno = 1;
    for line in lines {
        let line = line?;
        lineno += 1;
        if trajectories.len() == header.n {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::parse(
                lineno,
                format!("more trajectory lines than n={}", header.n),
            ));
        }
        trajectories.push(parse_trajectory(&line, lineno, &header)?);
    }
    if trajectories.len() != header.n {
        return Err(Error::parse(
            lineno + 1,
            format!("expected {} trajectory lines, found {}", header.n, trajectories.len()),
        ));
    }
    if header.labeled {
        let first = trajectories.first().and_then(|t| t.labels.as_ref()).map(|l| l[0]);
        if let Some(i) = trajectories
            .iter()
            .position(|t| t.labels.as_ref().map(|l| l[0]) != first)
        {
            return Err(Error::parse(
                i + 2,
                "all trajectories must start in the same latent state",
            ));
        }
    }
    TrajectoryDataset::new(header.agent, header.horizon, header.obs_len, trajectories)
}

pub fn render_dataset(ds: &TrajectoryDataset) -> String {
    let header = Header {
        agent: ds.agent(),
        horizon: ds.horizon(),
        obs_len: ds.obs_len(),
        n: ds.len(),
        labeled: ds.is_labeled() && !ds.is_empty(),
    };
    let mut out = header.render();
    out.push('\n');
    for tr in ds.trajectories() {
        for (t, o) in tr.observations.iter().enumerate() {
            if t > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{o}");
        }
        if header.labeled {
            out.push_str(" |");
            for l in tr.labels.as_ref().expect("labeled header implies labels") {
                let _ = write!(out, " {l}");
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_dataset<W: Write>(ds: &TrajectoryDataset, mut w: W) -> Result<()> {
    w.write_all(render_dataset(ds).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "EXBMDP v1 agent=A H=3 obslen=4 n=2 labeled=1\n\
                          0110 1001 0000 | 0 1 1\n\
                          0100 1011 0010 | 0 0 1\n";

    fn parse_err_line(text: &str) -> usize {
        match parse_dataset(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parses_sample_and_round_trips() {
        let ds = parse_dataset(SAMPLE).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.trajectories()[1].labels.as_deref(), Some(&[0, 0, 1][..]));
        assert!(ds.trajectories()[0].observations[0].get(1));
        assert_eq!(render_dataset(&ds), SAMPLE);
    }

    #[test]
    fn unlabeled_round_trip() {
        let text = "EXBMDP v1 agent=B H=2 obslen=3 n=1 labeled=0\n101 000\n";
        let ds = parse_dataset(text).unwrap();
        assert!(!ds.is_labeled());
        assert_eq!(render_dataset(&ds), text);
    }

    #[test]
    fn malformed_lines_report_their_number() {
        assert_eq!(parse_err_line("EXBMDP v2 agent=A H=3 obslen=4 n=2 labeled=1\n"), 1);
        assert_eq!(parse_err_line("EXBMDP v1 agent=C H=3 obslen=4 n=2 labeled=1\n"), 1);
        assert_eq!(parse_err_line(&SAMPLE.replace("0100 1011", "0100 10x1")), 3);
        assert_eq!(parse_err_line(&SAMPLE.replace("| 0 1 1", "| 0 1")), 2);
        assert_eq!(parse_err_line(&SAMPLE.replace("| 0 1 1", "")), 2);
        assert_eq!(parse_err_line(&SAMPLE.replace("0110 1001 0000", "0110 1001 000")), 2);
        assert_eq!(parse_err_line(&SAMPLE.replace("n=2", "n=3")), 4);
        assert_eq!(parse_err_line(&SAMPLE.replace("n=2", "n=1")), 3);
        assert_eq!(parse_err_line(&SAMPLE.replace("| 0 0 1", "| 1 0 1")), 3);
        assert_eq!(parse_err_line(""), 1);
    }
}
