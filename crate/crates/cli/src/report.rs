//! Classification result files and their text, LaTeX and fixture renderings.

use serde::{Deserialize, Serialize};
use symspread_core::classify::{ClassificationResult, FlagKey};
use symspread_core::fixture::{FixtureItem, FixtureList, PARAM_NAMES};
use symspread_core::geom::{parse_coords, Coords, UPPER};
use symspread_core::{Error, Field, Result};

use crate::Format;

/// The JSON result file, as written by `classify --format json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDoc {
    pub q: u32,
    pub min_poly: String,
    pub levels: Vec<Vec<NodeDoc>>,
    pub counts: Vec<usize>,
    pub maximal_counts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub dim: usize,
    pub index: usize,
    pub basis: Vec<String>,
    pub stabilizer: Vec<String>,
    pub stab_order: u64,
    pub orbit_size: Option<u64>,
    pub parent: Option<usize>,
    pub key: Option<FlagKey>,
    pub maximal: bool,
}

fn row(v: &[usize]) -> String {
    v.iter()
        .enumerate()
        .map(|(d, c)| format!("d={d}:{c}"))
        .collect::<Vec<_>>()
        .join(" ")
}

impl ResultDoc {
    pub fn from_result(r: &ClassificationResult) -> ResultDoc {
        let v = serde_json::to_value(r).expect("serializable");
        serde_json::from_value(v).expect("same shape")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Checks the field, the basis rows and the count columns.
    pub fn check(&self) -> Result<()> {
        let f = Field::new(self.q)?;
        let bad = |m: String| Error::Parse {
            line: 1,
            column: 1,
            message: m,
        };
        if self.counts.len() != self.levels.len() || self.maximal_counts.len() != self.levels.len() {
            return Err(bad("count columns do not match the levels".into()));
        }
        for (d, level) in self.levels.iter().enumerate() {
            if level.len() != self.counts[d] {
                return Err(bad(format!(
                    "dimension {d} lists {} nodes, count says {}",
                    level.len(),
                    self.counts[d]
                )));
            }
            if level.iter().filter(|n| n.maximal).count() != self.maximal_counts[d] {
                return Err(bad(format!("dimension {d} maximal count disagrees with its nodes")));
            }
            for n in level {
                if n.basis.len() != d + 1 {
                    return Err(bad(format!("node {d}.{} has {} basis rows", n.index, n.basis.len())));
                }
                for r in &n.basis {
                    parse_coords(&f, r, 1)?;
                }
            }
        }
        Ok(())
    }

    /// Header plus two rows: orbit counts and maximal counts per dimension.
    pub fn summary_table(&self) -> String {
        format!(
            "q={} minpoly={}\norbits  {}\nmaximal {}\n",
            self.q,
            self.min_poly,
            row(&self.counts),
            row(&self.maximal_counts)
        )
    }

    /// Representatives of dimension `d` as a fixture list.
    pub fn fixture(&self, d: usize) -> Result<FixtureList> {
        let f = Field::new(self.q)?;
        let items = self.levels[d]
            .iter()
            .map(|n| {
                let basis = n
                    .basis
                    .iter()
                    .map(|r| parse_coords(&f, r, 1))
                    .collect::<Result<Vec<Coords>>>()?;
                Ok(FixtureItem { basis })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FixtureList {
            q: self.q,
            min_poly: f.min_poly_string(),
            params: PARAM_NAMES[..=d].iter().map(|s| s.to_string()).collect(),
            claimed_count: items.len(),
            items,
        })
    }

    fn dims(&self, only: Option<usize>) -> Vec<usize> {
        match only {
            Some(d) => vec![d],
            None => (0..self.levels.len()).collect(),
        }
    }

    /// Text, LaTeX, or (for json) the representatives as fixture lists.
    pub fn render(&self, format: Format, only: Option<usize>) -> String {
        let f = Field::new(self.q).expect("checked");
        let lists: Vec<FixtureList> = self
            .dims(only)
            .into_iter()
            .map(|d| self.fixture(d).expect("checked"))
            .collect();
        match format {
            Format::Json => FixtureList::to_json_many(&lists).expect("serializable"),
            Format::Text => {
                let mut s = self.summary_table();
                for list in &lists {
                    s += &self.text_level(&f, list);
                }
                s
            }
            Format::Latex => {
                let mut s = format!(
                    "% q={}, \\alpha a root of {}\n% orbits  {}\n% maximal {}\n",
                    self.q,
                    self.min_poly,
                    row(&self.counts),
                    row(&self.maximal_counts)
                );
                for list in &lists {
                    s += &latex_level(&f, list);
                }
                s
            }
        }
    }

    fn text_level(&self, f: &Field, list: &FixtureList) -> String {
        let d = list.dim();
        let count = list.items.len();
        let mut s = format!("\ndimension {d}: {count} orbit{}\n", if count == 1 { "" } else { "s" });
        for (n, node) in self.levels[d].iter().enumerate() {
            let size = node.orbit_size.map(|x| x.to_string()).unwrap_or_else(|| "?".into());
            s += &format!(
                "#{}  orbit size {size}  stabilizer order {}{}\n",
                n + 1,
                node.stab_order,
                if node.maximal { "  maximal" } else { "" }
            );
            let cells: Vec<String> = (0..UPPER.len()).map(|k| list.entry_form(f, n, k, false)).collect();
            let width = cells.iter().map(String::len).max().unwrap_or(1);
            let mut k = 0;
            for i in 0..4 {
                let mut line = " ".repeat(2 + i * (width + 2));
                for _ in i..4 {
                    line += &format!("{:<w$}  ", cells[k], w = width);
                    k += 1;
                }
                s += line.trim_end();
                s.push('\n');
            }
        }
        s
    }
}

fn latex_level(f: &Field, list: &FixtureList) -> String {
    const PER_ROW: usize = 3;
    let mut s = format!(
        "\n% dimension {}: {} orbits\n\\begin{{longtable}}{{{}}}\n",
        list.dim(),
        list.items.len(),
        "c".repeat(PER_ROW)
    );
    for n in 0..list.items.len() {
        let mut k = 0;
        let mut rows = Vec::new();
        for i in 0..4 {
            let mut cells = vec![String::new(); i];
            for _ in i..4 {
                cells.push(list.entry_form(f, n, k, true));
                k += 1;
            }
            rows.push(cells.join(" & "));
        }
        s += &format!(
            "${}.\\ \\left(\\begin{{array}}{{cccc}}{}\\end{{array}}\\right)$",
            n + 1,
            rows.join(" \\\\ ")
        );
        s += if (n + 1) % PER_ROW == 0 || n + 1 == list.items.len() {
            " \\\\[2ex]\n"
        } else {
            " &\n"
        };
    }
    s + "\\end{longtable}\n"
}
