use std::collections::{BTreeSet, HashMap};

use super::value::{Atom, Value};

#[derive(Clone, Debug)]
struct SortInfo {
    name: String,
    elements: Vec<String>,
    as_set: Value,
}

/// The finite carrier sets of a specification.
///
/// Atom names are global: an atom name identifies exactly one element of
/// exactly one sort.
#[derive(Clone, Debug, Default)]
pub struct Universe {
    sorts: Vec<SortInfo>,
    sort_index: HashMap<String, u32>,
    atoms: HashMap<String, Atom>,
}

impl Universe {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers an enumerated sort. Fails on a duplicate sort or atom name.
    pub fn add_sort(&mut self, name: &str, elements: &[String]) -> Result<u32, String> {
        if self.sort_index.contains_key(name) {
            return Err(format!("duplicate sort `{name}`"));
        }
        let sort = self.sorts.len() as u32;
        let mut set = BTreeSet::new();
        for (i, e) in elements.iter().enumerate() {
            let atom = Atom {
                sort,
                index: i as u32,
            };
            if self.atoms.insert(e.clone(), atom).is_some() {
                return Err(format!("atom `{e}` declared twice"));
            }
            set.insert(Value::Atom(atom));
        }
        self.sorts.push(SortInfo {
            name: name.to_string(),
            elements: elements.to_vec(),
            as_set: Value::Set(set),
        });
        self.sort_index.insert(name.to_string(), sort);
        Ok(sort)
    }

    pub fn sort_id(&self, name: &str) -> Option<u32> {
        self.sort_index.get(name).copied()
    }

    pub fn sort_name(&self, sort: u32) -> &str {
        &self.sorts[sort as usize].name
    }

    pub fn sort_names(&self) -> impl Iterator<Item = &str> {
        self.sorts.iter().map(|s| s.name.as_str())
    }

    /// The sort as a set value.
    pub fn sort_set(&self, name: &str) -> Option<&Value> {
        self.sort_id(name).map(|id| &self.sorts[id as usize].as_set)
    }

    /// Elements of a sort in declaration order.
    pub fn atoms_of(&self, name: &str) -> Option<Vec<Atom>> {
        let id = self.sort_id(name)?;
        let n = self.sorts[id as usize].elements.len();
        Some(
            (0..n)
                .map(|i| Atom {
                    sort: id,
                    index: i as u32,
                })
                .collect(),
        )
    }

    pub fn atom(&self, name: &str) -> Option<Atom> {
        self.atoms.get(name).copied()
    }

    pub fn atom_name(&self, atom: Atom) -> &str {
        &self.sorts[atom.sort as usize].elements[atom.index as usize]
    }
}
