use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inequality::Inequality;
use crate::scalar::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowTag {
    LowerBound,
    UpperBound,
    Adjacency,
    CardinalityBottom,
    Cut,
    Other,
}

impl RowTag {
    pub fn name(self) -> &'static str {
        match self {
            RowTag::LowerBound => "lower-bound",
            RowTag::UpperBound => "upper-bound",
            RowTag::Adjacency => "adjacency",
            RowTag::CardinalityBottom => "cardinality-bottom",
            RowTag::Cut => "cut",
            RowTag::Other => "other",
        }
    }
}

impl FromStr for RowTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "lower-bound" => RowTag::LowerBound,
            "upper-bound" => RowTag::UpperBound,
            "adjacency" => RowTag::Adjacency,
            "cardinality-bottom" => RowTag::CardinalityBottom,
            "cut" => RowTag::Cut,
            "other" => RowTag::Other,
            _ => return Err(format!("unknown row tag `{s}`")),
        })
    }
}

/// A system `A x <= b` over `n_vars` variables, optionally with one tag per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    n_vars: usize,
    rows: Vec<Inequality>,
    tags: Option<Vec<RowTag>>,
}

impl LinearSystem {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            rows: Vec::new(),
            tags: None,
        }
    }

    pub fn from_rows(n_vars: usize, rows: Vec<Inequality>) -> Result<Self> {
        let mut sys = Self::new(n_vars);
        for row in rows {
            sys.push(row)?;
        }
        Ok(sys)
    }

    /// Convenience constructor from `(coeffs, rhs)` pairs; panics on ragged input.
    pub fn from_pairs(n_vars: usize, rows: &[(&[i64], i64)]) -> Self {
        let rows = rows
            .iter()
            .map(|(a, b)| Inequality::new(a.to_vec(), *b))
            .collect();
        Self::from_rows(n_vars, rows).expect("rows must have n_vars coefficients")
    }

    /// `0 <= x_i <= 1` for every variable.
    pub fn unit_box(n_vars: usize) -> Self {
        let mut sys = Self::new(n_vars);
        for i in 0..n_vars {
            sys.push_tagged(unit_row(n_vars, i, -1, 0), RowTag::LowerBound)
                .unwrap();
        }
        for i in 0..n_vars {
            sys.push_tagged(unit_row(n_vars, i, 1, 1), RowTag::UpperBound)
                .unwrap();
        }
        sys
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Inequality] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &Inequality {
        &self.rows[i]
    }

    pub fn tags(&self) -> Option<&[RowTag]> {
        self.tags.as_deref()
    }

    pub fn tag(&self, i: usize) -> Option<RowTag> {
        self.tags.as_ref().map(|t| t[i])
    }

    pub fn push(&mut self, row: Inequality) -> Result<()> {
        self.check_dim(&row)?;
        self.rows.push(row);
        if let Some(tags) = &mut self.tags {
            tags.push(RowTag::Other);
        }
        Ok(())
    }

    pub fn push_tagged(&mut self, row: Inequality, tag: RowTag) -> Result<()> {
        self.check_dim(&row)?;
        let tags = self
            .tags
            .get_or_insert_with(|| vec![RowTag::Other; self.rows.len()]);
        tags.push(tag);
        self.rows.push(row);
        Ok(())
    }

    fn check_dim(&self, row: &Inequality) -> Result<()> {
        if row.dim() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                found: row.dim(),
            });
        }
        Ok(())
    }

    /// Subsystem made of the given rows, in the given order, tags carried along.
    pub fn select(&self, indices: &[usize]) -> LinearSystem {
        LinearSystem {
            n_vars: self.n_vars,
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            tags: self
                .tags
                .as_ref()
                .map(|t| indices.iter().map(|&i| t[i]).collect()),
        }
    }

    pub fn without_tag(&self, tag: RowTag) -> LinearSystem {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.tag(i) != Some(tag)).collect();
        self.select(&keep)
    }

    pub fn indices_with_tag(&self, tag: RowTag) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.tag(i) == Some(tag)).collect()
    }

    /// Concatenation; tags are kept when either side carries them.
    pub fn extended(&self, other: &LinearSystem) -> Result<LinearSystem> {
        let mut out = self.clone();
        for (i, row) in other.rows.iter().enumerate() {
            match other.tag(i) {
                Some(tag) => out.push_tagged(row.clone(), tag)?,
                None => out.push(row.clone())?,
            }
        }
        Ok(out)
    }

    /// Index of the first row violated by `x`.
    pub fn first_violated<T: Field>(&self, x: &[T]) -> Option<usize> {
        self.rows.iter().position(|r| !r.is_satisfied_by(x))
    }

    pub fn contains<T: Field>(&self, x: &[T]) -> bool {
        x.len() == self.n_vars && self.first_violated(x).is_none()
    }

    pub fn tight_rows<T: Field>(&self, x: &[T]) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.rows[i].is_tight_at(x)).collect()
    }

    /// Whether every right-hand side is even.
    pub fn has_even_rhs(&self) -> bool {
        self.rows.iter().all(|r| r.rhs % 2 == 0)
    }

    /// Renders the system in the text format accepted by [`LinearSystem::parse`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses the text format: a header `<m> <n>` followed by `m` rows of `n + 1`
    /// integers `a_1 .. a_n b`, each optionally suffixed by `tag=<name>`.
    /// Lines starting with `#` and blank lines are ignored.
    pub fn parse(text: &str) -> Result<LinearSystem> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| {
                let t = l.trim_start();
                !t.is_empty() && !t.starts_with('#')
            });

        let (header_line, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: "missing `<m> <n>` header".into(),
        })?;
        let header_tokens = tokens(header);
        if header_tokens.len() != 2 {
            return Err(Error::Parse {
                line: header_line,
                column: 1,
                message: "header must be `<m> <n>`".into(),
            });
        }
        let n_rows: usize = parse_token(header_line, header_tokens[0])?;
        let n_vars: usize = parse_token(header_line, header_tokens[1])?;

        let mut sys = LinearSystem::new(n_vars);
        let mut tagged = false;
        let mut row_tags = Vec::with_capacity(n_rows);
        for _ in 0..n_rows {
            let (line_no, line) = lines.next().ok_or_else(|| Error::Parse {
                line: header_line,
                column: 1,
                message: format!("expected {n_rows} rows, found {}", sys.len()),
            })?;
            let mut toks = tokens(line);
            let mut tag = None;
            if let Some(&(col, last)) = toks.last() {
                if let Some(name) = last.strip_prefix("tag=") {
                    tag = Some(name.parse::<RowTag>().map_err(|message| Error::Parse {
                        line: line_no,
                        column: col,
                        message,
                    })?);
                    toks.pop();
                }
            }
            if toks.len() != n_vars + 1 {
                return Err(Error::Parse {
                    line: line_no,
                    column: 1,
                    message: format!("expected {} integers, found {}", n_vars + 1, toks.len()),
                });
            }
            let values = toks
                .iter()
                .map(|&tok| parse_token::<i64>(line_no, tok))
                .collect::<Result<Vec<_>>>()?;
            let (coeffs, rhs) = values.split_at(n_vars);
            tagged |= tag.is_some();
            row_tags.push(tag.unwrap_or(RowTag::Other));
            sys.push(Inequality::new(coeffs.to_vec(), rhs[0]))?;
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse {
                line,
                column: 1,
                message: format!("trailing content after {n_rows} rows"),
            });
        }
        if tagged {
            sys.tags = Some(row_tags);
        }
        Ok(sys)
    }
}

pub(crate) fn unit_row(n: usize, i: usize, coeff: i64, rhs: i64) -> Inequality {
    let mut coeffs = vec![0; n];
    coeffs[i] = coeff;
    Inequality::new(coeffs, rhs)
}

fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_token<T: FromStr>(line: usize, (column, tok): (usize, &str)) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        column,
        message: format!("`{tok}` is not a valid integer"),
    })
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.len(), self.n_vars)?;
        for (i, row) in self.rows.iter().enumerate() {
            write!(f, "{row}")?;
            if let Some(tag) = self.tag(i) {
                write!(f, " tag={}", tag.name())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for LinearSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LinearSystem::parse(s)
    }
}
