//! Small in-memory relations over graph nodes and frequency tables.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::graph::NodeId;

pub type Tuple = Vec<NodeId>;

/// Set of tuples over named columns. Columns are pattern node ids; rows are
/// kept sorted and distinct.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Relation {
    columns: Vec<usize>,
    rows: Vec<Tuple>,
}

impl Relation {
    pub fn new(columns: Vec<usize>, rows: impl IntoIterator<Item = Tuple>) -> Self {
        let mut rows: Vec<Tuple> = rows.into_iter().collect();
        debug_assert!(rows.iter().all(|r| r.len() == columns.len()));
        rows.sort_unstable();
        rows.dedup();
        Relation { columns, rows }
    }

    /// The relation with no columns and a single empty row: the neutral
    /// element of the natural join.
    pub fn unit() -> Self {
        Relation {
            columns: Vec::new(),
            rows: vec![Vec::new()],
        }
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn rows(&self) -> &[Tuple] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, row: &[NodeId]) -> bool {
        self.rows
            .binary_search_by(|r| r.as_slice().cmp(row))
            .is_ok()
    }

    pub fn column_index(&self, col: usize) -> Option<usize> {
        self.columns.iter().position(|&c| c == col)
    }

    /// Renames every column through `f`.
    pub fn rename(&self, f: impl Fn(usize) -> usize) -> Relation {
        Relation {
            columns: self.columns.iter().map(|&c| f(c)).collect(),
            rows: self.rows.clone(),
        }
    }

    /// Projection onto `cols` (each must exist), with duplicates removed.
    pub fn project(&self, cols: &[usize]) -> Relation {
        let idx: Vec<usize> = cols
            .iter()
            .map(|&c| self.column_index(c).expect("projected column exists"))
            .collect();
        Relation::new(
            cols.to_vec(),
            self.rows
                .iter()
                .map(|r| idx.iter().map(|&i| r[i]).collect()),
        )
    }

    /// Natural join on the shared columns. Output columns are this
    /// relation's columns followed by the other's new ones.
    pub fn natural_join(&self, other: &Relation) -> Relation {
        let shared: Vec<(usize, usize)> = self
            .columns
            .iter()
            .enumerate()
            .filter_map(|(i, c)| other.column_index(*c).map(|j| (i, j)))
            .collect();
        let extra: Vec<usize> = (0..other.columns.len())
            .filter(|j| !shared.iter().any(|&(_, s)| s == *j))
            .collect();
        let mut columns = self.columns.clone();
        columns.extend(extra.iter().map(|&j| other.columns[j]));

        let mut index: HashMap<Tuple, Vec<&Tuple>> = HashMap::new();
        for r in &other.rows {
            let key: Tuple = shared.iter().map(|&(_, j)| r[j]).collect();
            index.entry(key).or_default().push(r);
        }
        let mut rows = Vec::new();
        for l in &self.rows {
            let key: Tuple = shared.iter().map(|&(i, _)| l[i]).collect();
            if let Some(matches) = index.get(&key) {
                for r in matches {
                    let mut row = l.clone();
                    row.extend(extra.iter().map(|&j| r[j]));
                    rows.push(row);
                }
            }
        }
        Relation::new(columns, rows)
    }

    /// Same relation with columns permuted into `cols` order.
    pub fn reorder(&self, cols: &[usize]) -> Relation {
        assert_eq!(cols.len(), self.columns.len());
        self.project(cols)
    }
}

/// Support counts per parameter assignment. Keys list the values of the
/// `sigma` columns in order; only counts at or above the run's minsup are
/// kept. A table over no parameters has one entry with the empty key, or
/// none when the pattern is infrequent.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub sigma: Vec<usize>,
    pub entries: BTreeMap<Tuple, u64>,
}

impl FrequencyTable {
    pub fn new(sigma: Vec<usize>) -> Self {
        FrequencyTable {
            sigma,
            entries: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &[NodeId]) -> Option<u64> {
        self.entries.get(key).copied()
    }

    /// Keys as a relation over the parameter columns.
    pub fn to_relation(&self) -> Relation {
        Relation::new(self.sigma.clone(), self.entries.keys().cloned())
    }

    /// Renames the parameter columns and reorders keys so that columns are
    /// ascending again.
    pub fn rename(&self, f: impl Fn(usize) -> usize) -> FrequencyTable {
        let renamed: Vec<usize> = self.sigma.iter().map(|&c| f(c)).collect();
        let mut order: Vec<usize> = (0..renamed.len()).collect();
        order.sort_by_key(|&i| renamed[i]);
        FrequencyTable {
            sigma: order.iter().map(|&i| renamed[i]).collect(),
            entries: self
                .entries
                .iter()
                .map(|(k, &v)| (order.iter().map(|&i| k[i]).collect(), v))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u32) -> NodeId {
        NodeId(v)
    }

    fn rel(cols: &[usize], rows: &[&[u32]]) -> Relation {
        Relation::new(
            cols.to_vec(),
            rows.iter().map(|r| r.iter().map(|&v| n(v)).collect()),
        )
    }

    #[test]
    fn join_on_shared_columns() {
        let a = rel(&[0, 1], &[&[1, 2], &[1, 3], &[2, 3]]);
        let b = rel(&[1, 2], &[&[3, 7], &[2, 8], &[9, 9]]);
        let j = a.natural_join(&b);
        assert_eq!(j.columns(), &[0, 1, 2]);
        assert_eq!(j, rel(&[0, 1, 2], &[&[1, 2, 8], &[1, 3, 7], &[2, 3, 7]]));
    }

    #[test]
    fn disjoint_join_is_product() {
        let a = rel(&[0], &[&[0], &[2]]);
        let b = rel(&[1], &[&[1], &[2], &[3], &[4]]);
        assert_eq!(a.natural_join(&b).len(), 8);
    }

    #[test]
    fn unit_is_neutral_and_empty_annihilates() {
        let a = rel(&[0], &[&[5], &[6]]);
        assert_eq!(Relation::unit().natural_join(&a), a);
        assert_eq!(a.natural_join(&Relation::unit()), a);
        let empty = Relation::new(vec![], vec![]);
        assert!(a.natural_join(&empty).is_empty());
    }

    #[test]
    fn projection_dedups() {
        let a = rel(&[0, 1], &[&[1, 2], &[1, 3]]);
        assert_eq!(a.project(&[0]), rel(&[0], &[&[1]]));
        assert_eq!(a.reorder(&[1, 0]), rel(&[1, 0], &[&[2, 1], &[3, 1]]));
    }

    #[test]
    fn table_rename_reorders_keys() {
        let mut t = FrequencyTable::new(vec![0, 1]);
        t.entries.insert(vec![n(1), n(2)], 4);
        let r = t.rename(|c| if c == 0 { 5 } else { 3 });
        assert_eq!(r.sigma, vec![3, 5]);
        assert_eq!(r.get(&[n(2), n(1)]), Some(4));
    }
}
