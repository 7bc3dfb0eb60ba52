use std::sync::Arc;

use super::{EnvKind, HarnessError, RunConfig};
use crate::housesim::{load_tasks, TaskInstance};
use crate::shopsim::{load_catalog, load_goals, Catalog, ShoppingGoal};

/// First `n` items in file order.
pub fn select_tasks<T: Clone>(tasks: &[T], n: usize) -> Result<Vec<T>, HarnessError> {
    if tasks.len() < n {
        return Err(HarnessError::NotEnoughTasks {
            have: tasks.len(),
            want: n,
        });
    }
    Ok(tasks[..n].to_vec())
}

/// A loaded, already truncated task list.
#[derive(Debug, Clone)]
pub enum Suite {
    Shop {
        catalog: Arc<Catalog>,
        goals: Vec<ShoppingGoal>,
    },
    House {
        tasks: Vec<TaskInstance>,
    },
}

impl Suite {
    pub fn load(cfg: &RunConfig) -> Result<Self, HarnessError> {
        match cfg.environment {
            EnvKind::Shop => {
                let catalog_file = cfg
                    .catalog_file
                    .as_ref()
                    .ok_or_else(|| HarnessError::Config("shop runs need catalog_file".into()))?;
                let catalog = Arc::new(load_catalog(catalog_file)?);
                let goals = select_tasks(&load_goals(&cfg.task_file)?, cfg.first_n)?;
                Ok(Suite::Shop { catalog, goals })
            }
            EnvKind::House => Ok(Suite::House {
                tasks: select_tasks(&load_tasks(&cfg.task_file)?, cfg.first_n)?,
            }),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Suite::Shop { goals, .. } => goals.len(),
            Suite::House { tasks } => tasks.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Task ids in suite order. Shop goals without an id get `shop-<index>`.
    pub fn task_ids(&self) -> Vec<String> {
        match self {
            Suite::Shop { goals, .. } => goals
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    if g.id.is_empty() {
                        format!("shop-{i}")
                    } else {
                        g.id.clone()
                    }
                })
                .collect(),
            Suite::House { tasks } => tasks.iter().map(|t| t.task.id.clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_n_in_file_order() {
        let items: Vec<u32> = (1..=100).collect();
        assert_eq!(select_tasks(&items, 50).unwrap(), (1..=50).collect::<Vec<_>>());
        assert_eq!(select_tasks(&items, 1).unwrap(), vec![1]);
        assert_eq!(select_tasks(&items, 7).unwrap(), select_tasks(&items, 7).unwrap());
        assert!(matches!(
            select_tasks(&items, 101),
            Err(HarnessError::NotEnoughTasks { have: 100, want: 101 })
        ));
    }
}
