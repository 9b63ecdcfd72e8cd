//! Plain-text output: annotation tables and dense grids.

use aramat_core::kdata::{DomainAssignment, KRelation};
use aramat_core::matlang::Matrix;
use aramat_core::semiring::Semiring;

fn layout(rows: &[Vec<String>]) -> String {
    let ncols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncols)
        .map(|j| rows.iter().filter_map(|r| r.get(j)).map(|c| c.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// One row per nonzero tuple in canonical order, then the annotation.
pub fn relation_table<K: Semiring>(r: &KRelation<K>, d: &DomainAssignment) -> String {
    let mut rows = vec![r
        .schema()
        .iter()
        .map(|a| a.name().to_string())
        .chain(["value".to_string()])
        .collect::<Vec<_>>()];
    for (t, k) in r.support() {
        let mut row: Vec<String> = t.to_atoms(r.schema(), d).into_iter().map(|(_, a)| a.to_string()).collect();
        row.push(k.to_string());
        rows.push(row);
    }
    layout(&rows)
}

/// Every entry, zeros included, one matrix row per line.
pub fn matrix_grid<K: Semiring>(m: &Matrix<K>) -> String {
    let rows: Vec<Vec<String>> = (0..m.rows()).map(|i| m.row(i).iter().map(K::to_string).collect()).collect();
    layout(&rows)
}
