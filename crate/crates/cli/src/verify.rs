//! Builds and checks the form of every class that has a recipe.

use rayon::prelude::*;
use serde::Serialize;

use nsmooth_core::enumeration::ClassificationTable;
use nsmooth_core::forms::{build_form, verify_form, FormCheck, RecipeStatus};
use nsmooth_core::{FpClass, ManifoldInvariants, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    NoRecipe,
    SmoothExample,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyEntry {
    pub label: String,
    pub class: FpClass,
    pub outcome: Outcome,
    pub recipe: Option<String>,
    pub eigenspaces_nonnegative: bool,
    pub failures: Vec<String>,
    pub check: Option<FormCheck>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub checked: u64,
    pub passed: u64,
    pub failed: u64,
    pub no_recipe: u64,
    pub smooth_example: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub version: u32,
    pub p: u32,
    pub manifold: ManifoldInvariants,
    pub entries: Vec<VerifyEntry>,
    pub summary: VerifySummary,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }
}

/// Picks `n` evenly spaced indices out of `len` (all of them when n ≥ len).
pub fn even_sample(len: usize, n: usize) -> Vec<usize> {
    if n >= len {
        return (0..len).collect();
    }
    (0..n).map(|i| i * len / n).collect()
}

/// Verifies the recipes of the selected classes of `table`.
///
/// `filter` restricts to one class (compared after weak canonicalization);
/// `sample` keeps an evenly spaced subset of the classes with a recipe.
pub fn verify_table(
    table: &ClassificationTable,
    filter: Option<&FpClass>,
    sample: Option<usize>,
) -> Result<VerificationReport> {
    let wanted = filter.map(nsmooth_core::fixed_point::weak_canonical);
    let mut selected: Vec<_> = table
        .records
        .iter()
        .filter(|r| wanted.as_ref().is_none_or(|w| &r.class == w))
        .collect();
    if let Some(n) = sample {
        let with_recipe: Vec<_> = selected
            .iter()
            .copied()
            .filter(|r| r.recipe_status.recipe().is_some())
            .collect();
        selected = even_sample(with_recipe.len(), n).into_iter().map(|i| with_recipe[i]).collect();
    }
    let entries: Vec<VerifyEntry> = selected
        .par_iter()
        .map(|r| {
            let base = VerifyEntry {
                label: r.label.clone(),
                class: r.class.clone(),
                outcome: Outcome::NoRecipe,
                recipe: None,
                eigenspaces_nonnegative: r.eigenspaces_nonnegative,
                failures: Vec::new(),
                check: None,
            };
            Ok(match &r.recipe_status {
                RecipeStatus::NoRecipe => base,
                RecipeStatus::SmoothExample => VerifyEntry { outcome: Outcome::SmoothExample, ..base },
                RecipeStatus::Recipe(recipe) => {
                    let lattice = build_form(recipe)?;
                    let check = verify_form(&lattice, &recipe.to_string(), &r.class, &table.manifold)?;
                    VerifyEntry {
                        outcome: if check.passed() { Outcome::Pass } else { Outcome::Fail },
                        recipe: Some(recipe.to_string()),
                        failures: check.failures().into_iter().map(String::from).collect(),
                        check: Some(check),
                        ..base
                    }
                }
            })
        })
        .collect::<Result<_>>()?;
    let mut summary = VerifySummary::default();
    for e in &entries {
        summary.checked += 1;
        match e.outcome {
            Outcome::Pass => summary.passed += 1,
            Outcome::Fail => summary.failed += 1,
            Outcome::NoRecipe => summary.no_recipe += 1,
            Outcome::SmoothExample => summary.smooth_example += 1,
        }
    }
    Ok(VerificationReport {
        version: crate::SCHEMA_VERSION,
        p: table.p,
        manifold: table.manifold.clone(),
        entries,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_even_and_bounded() {
        assert_eq!(even_sample(10, 3), vec![0, 3, 6]);
        assert_eq!(even_sample(2, 5), vec![0, 1]);
    }
}
