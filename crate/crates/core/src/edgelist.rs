//! Tab-separated edge-list format for attachment histories.
//!
//! ```text
//! # pa-secdeg v1 n=3
//! 1	1
//! 2	1
//! 3	2
//! ```
//!
//! One line per vertex `t >= 1`. A history generated for `G_m^n` with `m > 1`
//! stores the underlying `G_1^{mn}` and appends ` m=<m>` to the header.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::multigraph::AttachmentHistory;

pub const MAGIC: &str = "# pa-secdeg v1";

/// A parsed edge-list file: the history plus the block size to collapse by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    pub history: AttachmentHistory,
    pub m: usize,
}

pub fn header(n: usize, m: usize) -> String {
    if m == 1 {
        format!("{MAGIC} n={n}")
    } else {
        format!("{MAGIC} n={n} m={m}")
    }
}

pub fn write<W: Write>(mut w: W, history: &AttachmentHistory, m: usize) -> Result<()> {
    writeln!(w, "{}", header(history.len(), m))?;
    for (i, s) in history.targets().iter().enumerate() {
        writeln!(w, "{}\t{}", i + 1, s)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read<R: BufRead>(r: R) -> Result<EdgeList> {
    let mut lines = r.lines();
    let first = lines.next().transpose()?.ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let (n, m) = parse_header(&first)?;
    let mut targets = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::Parse {
            line: lineno,
            msg: msg.to_string(),
        };
        let (t, s) = line
            .split_once('\t')
            .ok_or_else(|| bad("expected `t<TAB>target`"))?;
        let t: usize = t.parse().map_err(|_| bad("vertex is not an integer"))?;
        let s: usize = s.parse().map_err(|_| bad("target is not an integer"))?;
        if t != targets.len() + 1 {
            return Err(bad(&format!(
                "expected vertex {}, found {t}",
                targets.len() + 1
            )));
        }
        targets.push(s);
    }
    if targets.len() != n {
        return Err(Error::Parse {
            line: targets.len() + 1,
            msg: format!(
                "header declares n={n} but {} vertices follow",
                targets.len()
            ),
        });
    }
    if m == 0 || n % m != 0 {
        return Err(Error::BlockSize { n, m });
    }
    Ok(EdgeList {
        history: AttachmentHistory::new(targets)?,
        m,
    })
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let bad = |msg: String| Error::Parse { line: 1, msg };
    let rest = line
        .strip_prefix(MAGIC)
        .ok_or_else(|| bad(format!("expected header starting with `{MAGIC}`")))?;
    let mut n = None;
    let mut m = 1;
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("n", v)) => n = Some(v.parse().map_err(|_| bad(format!("bad n: {v}")))?),
            Some(("m", v)) => m = v.parse().map_err(|_| bad(format!("bad m: {v}")))?,
            _ => return Err(bad(format!("unknown header field `{field}`"))),
        }
    }
    Ok((n.ok_or_else(|| bad("header lacks n=".into()))?, m))
}
