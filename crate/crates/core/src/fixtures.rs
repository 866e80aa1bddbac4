//! Reference tables as JSON documents and the harness that recomputes them.

use crate::contfrac::FieldContext;
use crate::error::{Error, Result};
use crate::partition::{Column, PartitionGrid};
use crate::quadfield::{FieldId, QElement};
use crate::search::{search_with_grid, ElementDoc};
use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// One row of the unit table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitRow {
    pub d: u64,
    pub eps_plus: ElementDoc,
    #[serde(with = "crate::bigjson::int")]
    pub floor_ratio: BigInt,
    pub y_max: u64,
    #[serde(with = "crate::bigjson::uint")]
    pub corner: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepColumn {
    pub d: u64,
    pub rows: Vec<crate::search::RepRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Body {
    /// `rows[y][x] = p_K(x + yω)` for `y ≥ 0`; `0` marks a cell that is not
    /// totally positive.
    XyGrid {
        d: u64,
        max_x: u64,
        max_y: u64,
        rows: Vec<Vec<u64>>,
    },
    /// `rows[y][k] = p_K((⌈yξ⌉ + k) + yω)`.
    KyGrid {
        d: u64,
        k_max: u64,
        y_max: u64,
        rows: Vec<Vec<u64>>,
    },
    UnitTable {
        rows: Vec<UnitRow>,
    },
    Representatives {
        m_max: u64,
        columns: Vec<RepColumn>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub provenance: String,
    #[serde(flatten)]
    pub body: Body,
}

const EMBEDDED: [(&str, &str); 12] = [
    ("figure1.json", include_str!("../fixtures/figure1.json")),
    ("table1.json", include_str!("../fixtures/table1.json")),
    ("table2.json", include_str!("../fixtures/table2.json")),
    ("table3.json", include_str!("../fixtures/table3.json")),
    ("table4.json", include_str!("../fixtures/table4.json")),
    ("table5.json", include_str!("../fixtures/table5.json")),
    ("table6.json", include_str!("../fixtures/table6.json")),
    ("table7.json", include_str!("../fixtures/table7.json")),
    ("table8.json", include_str!("../fixtures/table8.json")),
    ("table9.json", include_str!("../fixtures/table9.json")),
    ("table10.json", include_str!("../fixtures/table10.json")),
    ("table11.json", include_str!("../fixtures/table11.json")),
];

fn parse(name: &str, text: &str) -> Result<Fixture> {
    serde_json::from_str(text).map_err(|e| Error::Unsupported(format!("{name}: {e}")))
}

/// The reference tables compiled into the binary.
pub fn embedded() -> Vec<Fixture> {
    EMBEDDED
        .iter()
        .map(|(name, text)| parse(name, text).expect("embedded fixture parses"))
        .collect()
}

/// Loads one fixture file, or every `*.json` file of a directory in name order.
pub fn load(path: &Path) -> Result<Vec<Fixture>> {
    let io = |e: std::io::Error| Error::Unsupported(format!("{}: {e}", path.display()));
    if path.is_dir() {
        let mut files: Vec<_> = std::fs::read_dir(path)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        files.iter().map(|p| load_file(p)).collect()
    } else {
        Ok(vec![load_file(path)?])
    }
}

fn load_file(path: &Path) -> Result<Fixture> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Unsupported(format!("{}: {e}", path.display())))?;
    parse(&path.display().to_string(), &text)
}

/// A cell that differs from the reference value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub fixture: String,
    pub d: u64,
    /// Cell or row label such as `y=3 k=2` or `m=4`.
    pub at: String,
    pub expected: String,
    pub got: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(
            f,
            "{}: D={} {} expected {} got {}",
            self.fixture, self.d, self.at, self.expected, self.got
        )
    }
}

/// Grids shared across fixtures, one per field.
#[derive(Default)]
pub struct GridCache {
    grids: BTreeMap<u64, PartitionGrid>,
}

impl GridCache {
    pub fn get(&mut self, d: u64) -> Result<&mut PartitionGrid> {
        if let std::collections::btree_map::Entry::Vacant(e) = self.grids.entry(d) {
            let ctx = FieldContext::new(d as i64)?;
            e.insert(PartitionGrid::new(ctx));
        }
        Ok(self.grids.get_mut(&d).expect("just inserted"))
    }
}

/// Recomputes every value of a fixture and lists the differences.
pub fn verify(fx: &Fixture, cache: &mut GridCache) -> Result<Vec<Mismatch>> {
    let mut out = Vec::new();
    let mut miss = |d: u64, at: String, expected: String, got: String| {
        out.push(Mismatch {
            fixture: fx.provenance.clone(),
            d,
            at,
            expected,
            got,
        })
    };
    match &fx.body {
        Body::XyGrid { d, max_x, rows, .. } => {
            let grid = cache.get(*d)?;
            grid.extend_to(*max_x)?;
            for (y, row) in rows.iter().enumerate() {
                for (x, &want) in row.iter().enumerate() {
                    let got = grid.get(x as i64, y as i64).cloned().unwrap_or_default();
                    if got != BigUint::from(want) {
                        miss(
                            *d,
                            format!("x={x} y={y}"),
                            want.to_string(),
                            got.to_string(),
                        );
                    }
                }
            }
        }
        Body::KyGrid { d, rows, .. } => {
            let grid = cache.get(*d)?;
            for (y, row) in rows.iter().enumerate() {
                for (k, &want) in row.iter().enumerate() {
                    let got = grid.count_ky(k as u64, y as u64)?;
                    if got != BigUint::from(want) {
                        miss(
                            *d,
                            format!("y={y} k={k}"),
                            want.to_string(),
                            got.to_string(),
                        );
                    }
                }
            }
        }
        Body::UnitTable { rows } => {
            for row in rows {
                let d = row.d;
                let grid = cache.get(d)?;
                let ctx = grid.ctx().clone();
                let eps = ElementDoc::new(&ctx.eps_plus, &ctx.field);
                if eps != row.eps_plus {
                    miss(d, "eps_plus".into(), row.eps_plus.text.clone(), eps.text);
                }
                let ratio = ctx.floor_ratio_eps();
                if ratio != row.floor_ratio {
                    miss(
                        d,
                        "floor_ratio".into(),
                        row.floor_ratio.to_string(),
                        ratio.to_string(),
                    );
                }
                let corner = grid.count_ky(0, row.y_max)?;
                if corner != row.corner {
                    miss(
                        d,
                        format!("corner y={}", row.y_max),
                        row.corner.to_string(),
                        corner.to_string(),
                    );
                }
            }
        }
        Body::Representatives { m_max, columns } => {
            for col in columns {
                let report = search_with_grid(cache.get(col.d)?, *m_max)?;
                for m in 1..=*m_max {
                    let want: Vec<QElement> = col
                        .rows
                        .iter()
                        .find(|r| r.m == m)
                        .map(|r| r.elements.iter().map(ElementDoc::element).collect())
                        .unwrap_or_default();
                    let got = report.reps(m);
                    if sorted(want.clone()) != got {
                        let field = FieldId::new(col.d as i64)?;
                        miss(
                            col.d,
                            format!("m={m}"),
                            render_set(&want, &field),
                            render_set(&got, &field),
                        );
                    }
                }
            }
        }
    }
    Ok(out)
}

fn sorted(mut v: Vec<QElement>) -> Vec<QElement> {
    v.sort();
    v
}

fn render_set(v: &[QElement], field: &FieldId) -> String {
    let parts: Vec<String> = v.iter().map(|e| field.render(e)).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Number of values checked by a fixture.
pub fn cell_count(fx: &Fixture) -> usize {
    match &fx.body {
        Body::XyGrid { rows, .. } | Body::KyGrid { rows, .. } => rows.iter().map(Vec::len).sum(),
        Body::UnitTable { rows } => rows.len() * 3,
        Body::Representatives { m_max, columns } => columns.len() * *m_max as usize,
    }
}

/// The `y ≥ 0` part of a grid as an [`Body::XyGrid`] document.
pub fn xy_doc(grid: &PartitionGrid) -> Body {
    let max_x = grid.max_x();
    let max_y = grid
        .columns()
        .iter()
        .map(Column::y_max)
        .max()
        .unwrap_or(0)
        .max(0) as u64;
    let rows = (0..=max_y as i64)
        .map(|y| {
            (0..=max_x as i64)
                .map(|x| {
                    grid.get(x, y)
                        .map_or(0, |c| u64::try_from(c).unwrap_or(u64::MAX))
                })
                .collect()
        })
        .collect();
    Body::XyGrid {
        d: grid.field().d(),
        max_x,
        max_y,
        rows,
    }
}

/// Full grid including negative `y`, in a form that round-trips exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDoc {
    pub d: u64,
    pub columns: Vec<ColumnDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnDoc {
    pub x: u64,
    pub y_min: i64,
    #[serde(with = "crate::bigjson::uint_vec")]
    pub counts: Vec<BigUint>,
}

impl GridDoc {
    pub fn from_grid(grid: &PartitionGrid) -> Self {
        GridDoc {
            d: grid.field().d(),
            columns: grid
                .columns()
                .iter()
                .enumerate()
                .map(|(x, c)| ColumnDoc {
                    x: x as u64,
                    y_min: c.y_min,
                    counts: c.counts.clone(),
                })
                .collect(),
        }
    }

    pub fn into_grid(self) -> Result<PartitionGrid> {
        let ctx = FieldContext::new(self.d as i64)?;
        for (i, c) in self.columns.iter().enumerate() {
            if c.x != i as u64 {
                return Err(Error::Invariant(format!(
                    "column {} stored at position {i}",
                    c.x
                )));
            }
        }
        let cols = self
            .columns
            .into_iter()
            .map(|c| Column {
                y_min: c.y_min,
                counts: c.counts,
            })
            .collect();
        PartitionGrid::from_columns(ctx, cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_documents_parse() {
        let all = embedded();
        assert_eq!(all.len(), 12);
        let cells: usize = all.iter().map(cell_count).sum();
        assert_eq!(cells, 88 + 7 * 104 + 8 * 3 + 8 * 11);
        for fx in &all {
            let s = serde_json::to_string(fx).unwrap();
            let back: Fixture = serde_json::from_str(&s).unwrap();
            assert_eq!(&back, fx);
        }
    }

    #[test]
    fn xy_grid_matches_and_detects_corruption() {
        let mut fx = embedded().into_iter().next().unwrap();
        let mut cache = GridCache::default();
        assert!(verify(&fx, &mut cache).unwrap().is_empty());
        if let Body::XyGrid { rows, .. } = &mut fx.body {
            rows[2][5] += 1;
        }
        let bad = verify(&fx, &mut cache).unwrap();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].at, "x=5 y=2");
        assert_eq!(bad[0].expected, "7");
        assert_eq!(bad[0].got, "6");
    }

    #[test]
    fn xy_doc_round_trip() {
        let grid = PartitionGrid::build(FieldContext::new(2).unwrap(), 10).unwrap();
        let doc = xy_doc(&grid);
        assert_eq!(doc, embedded()[0].body);
        let s = serde_json::to_string(&doc).unwrap();
        assert_eq!(serde_json::from_str::<Body>(&s).unwrap(), doc);
    }

    #[test]
    fn grid_doc_round_trip() {
        let grid = PartitionGrid::build(FieldContext::new(13).unwrap(), 12).unwrap();
        let doc = GridDoc::from_grid(&grid);
        let s = serde_json::to_string(&doc).unwrap();
        let back: GridDoc = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
        let g2 = back.into_grid().unwrap();
        assert_eq!(g2.columns(), grid.columns());
    }

    #[test]
    fn missing_file_is_an_error() {
        assert!(load(Path::new("/nonexistent/fixture.json")).is_err());
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.json"), EMBEDDED[0].1).unwrap();
        std::fs::write(dir.path().join("b.txt"), "ignored").unwrap();
        assert_eq!(load(dir.path()).unwrap().len(), 1);
        assert_eq!(load(&dir.path().join("a.json")).unwrap().len(), 1);
    }
}
