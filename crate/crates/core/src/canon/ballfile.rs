//! Line-oriented ball-collection files.
//!
//! Codes mode:
//! ```text
//! codes <n> <r>
//! <v> <r> <hex code>        (one line per vertex)
//! ```
//! Full mode embeds each ball's local edge list, root at local id 0:
//! ```text
//! full <n> <r>
//! ball <v> <r> <k> <m>
//! <a> <b>                   (m lines)
//! ```
//! Blank lines and lines starting with `#` are ignored.

use std::io::{BufRead, Write};

use thiserror::Error;

use super::{canonical_code_rooted, CanonicalCode};
use crate::graph::RootedBall;

#[derive(Debug, Error)]
pub enum BallFileError {
    #[error("ball file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BallFile {
    Codes { n: usize, radius: usize, codes: Vec<CanonicalCode> },
    Full { n: usize, radius: usize, balls: Vec<RootedBall> },
}

impl BallFile {
    pub fn n(&self) -> usize {
        match self {
            BallFile::Codes { n, .. } | BallFile::Full { n, .. } => *n,
        }
    }

    pub fn radius(&self) -> usize {
        match self {
            BallFile::Codes { radius, .. } | BallFile::Full { radius, .. } => *radius,
        }
    }

    /// Rooted codes of all balls, computing them in full mode.
    pub fn codes(&self) -> Vec<CanonicalCode> {
        match self {
            BallFile::Codes { codes, .. } => codes.clone(),
            BallFile::Full { balls, .. } => balls.iter().map(canonical_code_rooted).collect(),
        }
    }
}

pub fn write_ball_codes<W: Write>(
    mut out: W,
    radius: usize,
    codes: &[CanonicalCode],
) -> std::io::Result<()> {
    writeln!(out, "codes {} {}", codes.len(), radius)?;
    for (v, c) in codes.iter().enumerate() {
        writeln!(out, "{v} {radius} {c}")?;
    }
    Ok(())
}

/// Writes balls in full mode. `balls[i]` must be the ball around vertex `i`.
pub fn write_ball_collection<W: Write>(
    mut out: W,
    radius: usize,
    balls: &[RootedBall],
) -> std::io::Result<()> {
    writeln!(out, "full {} {}", balls.len(), radius)?;
    for (v, b) in balls.iter().enumerate() {
        let edges = b.local_edges();
        writeln!(out, "ball {v} {} {} {}", b.radius(), b.len(), edges.len())?;
        for (a, c) in edges {
            writeln!(out, "{a} {c}")?;
        }
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_content(&mut self) -> Result<Option<(usize, String)>, BallFileError> {
        for l in self.inner.by_ref() {
            self.line += 1;
            let l = l?;
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            return Ok(Some((self.line, t.to_string())));
        }
        Ok(None)
    }

    fn expect(&mut self) -> Result<(usize, String), BallFileError> {
        self.next_content()?
            .ok_or_else(|| BallFileError::Parse { line: self.line + 1, msg: "unexpected end of file".into() })
    }
}

fn fields<const K: usize>(line: usize, s: &str) -> Result<[&str; K], BallFileError> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    parts.try_into().map_err(|p: Vec<&str>| BallFileError::Parse {
        line,
        msg: format!("expected {K} fields, found {}", p.len()),
    })
}

fn num(line: usize, s: &str) -> Result<usize, BallFileError> {
    s.parse().map_err(|_| BallFileError::Parse { line, msg: format!("bad integer {s:?}") })
}

pub fn read_ball_file<R: BufRead>(input: R) -> Result<BallFile, BallFileError> {
    let mut lines = Lines { inner: input.lines(), line: 0 };
    let (ln, header) = lines.expect()?;
    let [mode, n, r] = fields::<3>(ln, &header)?;
    let (n, radius) = (num(ln, n)?, num(ln, r)?);
    let bad = |line: usize, msg: String| BallFileError::Parse { line, msg };
    let file = match mode {
        "codes" => {
            let mut codes = Vec::with_capacity(n);
            for i in 0..n {
                let (ln, l) = lines.expect()?;
                let [v, r, h] = fields::<3>(ln, &l)?;
                if num(ln, v)? != i {
                    return Err(bad(ln, format!("expected vertex {i}")));
                }
                if num(ln, r)? != radius {
                    return Err(bad(ln, "radius differs from header".into()));
                }
                let code = CanonicalCode::from_hex(h).map_err(|_| bad(ln, "bad hex code".into()))?;
                if code.as_bytes().len() < 9 {
                    return Err(bad(ln, "code too short".into()));
                }
                codes.push(code);
            }
            BallFile::Codes { n, radius, codes }
        }
        "full" => {
            let mut balls = Vec::with_capacity(n);
            for i in 0..n {
                let (ln, l) = lines.expect()?;
                let [tag, v, r, k, m] = fields::<5>(ln, &l)?;
                if tag != "ball" {
                    return Err(bad(ln, format!("expected a ball record, found {tag:?}")));
                }
                if num(ln, v)? != i {
                    return Err(bad(ln, format!("expected vertex {i}")));
                }
                if num(ln, r)? != radius {
                    return Err(bad(ln, "radius differs from header".into()));
                }
                let (k, m) = (num(ln, k)?, num(ln, m)?);
                let mut edges = Vec::with_capacity(m);
                for _ in 0..m {
                    let (ln, l) = lines.expect()?;
                    let [a, b] = fields::<2>(ln, &l)?;
                    edges.push((num(ln, a)?, num(ln, b)?));
                }
                let ball = RootedBall::from_local_edges(i, radius, k, &edges)
                    .map_err(|e| bad(ln, e.to_string()))?;
                balls.push(ball);
            }
            BallFile::Full { n, radius, balls }
        }
        other => return Err(bad(ln, format!("unknown ball file mode {other:?}"))),
    };
    if let Some((ln, _)) = lines.next_content()? {
        return Err(BallFileError::Parse { line: ln, msg: "trailing content".into() });
    }
    Ok(file)
}
