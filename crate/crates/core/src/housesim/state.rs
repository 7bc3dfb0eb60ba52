use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{class_of, HouseTask, TaskFamily, WorldSpec, CLEANER, COOLER, HEATER, LAMP};
use crate::text::normalize_action;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Location {
    Receptacle(String),
    Inventory,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObjectFlags {
    pub clean: bool,
    pub hot: bool,
    pub cold: bool,
}

/// Mutable world state. The static layout lives in [`WorldSpec`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HouseState {
    /// Receptacle the agent stands at; `None` before the first move.
    pub agent: Option<String>,
    pub objects: BTreeMap<String, Location>,
    pub flags: BTreeMap<String, ObjectFlags>,
    pub open: BTreeSet<String>,
    pub lamps_on: BTreeSet<String>,
}

/// "a x", "a x, and a y", "a x, a y, and a z".
pub(crate) fn list_items<S: AsRef<str>>(items: &[S]) -> String {
    let items: Vec<String> = items.iter().map(|s| format!("a {}", s.as_ref())).collect();
    match items.len() {
        0 => "nothing".into(),
        1 => items[0].clone(),
        n => format!("{}, and {}", items[..n - 1].join(", "), items[n - 1]),
    }
}

pub(crate) fn room_listing(world: &WorldSpec) -> String {
    let ids: Vec<&str> = world.receptacles.iter().map(|r| r.id.as_str()).collect();
    format!(
        "You are in the middle of a room. Looking quickly around you, you see {}.",
        list_items(&ids)
    )
}

impl HouseState {
    pub fn initial(world: &WorldSpec) -> Self {
        Self {
            agent: None,
            objects: world
                .objects
                .iter()
                .map(|o| (o.id.clone(), Location::Receptacle(o.location.clone())))
                .collect(),
            flags: world
                .objects
                .iter()
                .map(|o| (o.id.clone(), ObjectFlags::default()))
                .collect(),
            open: BTreeSet::new(),
            lamps_on: BTreeSet::new(),
        }
    }

    pub fn holding(&self) -> Option<&str> {
        self.objects
            .iter()
            .find(|(_, loc)| **loc == Location::Inventory)
            .map(|(id, _)| id.as_str())
    }

    /// Objects inside a receptacle, sorted by id.
    pub fn contents(&self, receptacle: &str) -> Vec<&str> {
        self.objects
            .iter()
            .filter(|(_, loc)| matches!(loc, Location::Receptacle(r) if r == receptacle))
            .map(|(id, _)| id.as_str())
            .collect()
    }

    /// Contents are visible unless the receptacle is closed.
    pub fn is_visible(&self, world: &WorldSpec, receptacle: &str) -> bool {
        world
            .receptacle(receptacle)
            .is_some_and(|r| !r.openable || self.open.contains(receptacle))
    }

    pub fn describe(&self, world: &WorldSpec, receptacle: &str) -> String {
        let openable = world.receptacle(receptacle).is_some_and(|r| r.openable);
        if openable && !self.open.contains(receptacle) {
            return format!("The {receptacle} is closed.");
        }
        let items = list_items(&self.contents(receptacle));
        if openable {
            format!("The {receptacle} is open. In it, you see {items}.")
        } else {
            format!("On the {receptacle}, you see {items}.")
        }
    }

    /// Every executable action in the current state, sorted.
    pub fn available_actions(&self, world: &WorldSpec) -> Vec<String> {
        let mut actions = vec!["inventory".to_string(), "look".to_string()];
        for r in &world.receptacles {
            if self.agent.as_deref() != Some(r.id.as_str()) {
                actions.push(format!("go to {}", r.id));
            }
        }
        if let Some(here) = self.agent.as_deref() {
            actions.push(format!("examine {here}"));
            let spec = world.receptacle(here).expect("agent stands at a receptacle");
            if spec.openable {
                if self.open.contains(here) {
                    actions.push(format!("close {here}"));
                } else {
                    actions.push(format!("open {here}"));
                }
            }
            if self.is_visible(world, here) {
                let held = self.holding();
                for o in self.contents(here) {
                    if class_of(o) == LAMP {
                        actions.push(format!("use {o}"));
                    } else if held.is_none() {
                        actions.push(format!("take {o} from {here}"));
                    }
                }
                if let Some(o) = held {
                    actions.push(format!("put {o} in/on {here}"));
                }
            }
            if let Some(o) = self.holding() {
                match class_of(here) {
                    CLEANER => actions.push(format!("clean {o} with {here}")),
                    HEATER => actions.push(format!("heat {o} with {here}")),
                    COOLER => actions.push(format!("cool {o} with {here}")),
                    _ => {}
                }
            }
        }
        actions.sort();
        actions
    }

    /// Apply an action; `None` when it is not currently executable.
    pub fn apply(&mut self, world: &WorldSpec, action: &str) -> Option<String> {
        let action = normalize_action(action);
        if !self.available_actions(world).contains(&action) {
            return None;
        }
        let here = self.agent.clone();
        let obs = if action == "look" {
            match &here {
                None => room_listing(world),
                Some(r) => format!("You are facing the {r}. {}", self.describe(world, r)),
            }
        } else if action == "inventory" {
            match self.holding() {
                Some(o) => format!("You are carrying: a {o}."),
                None => "You are not carrying anything.".into(),
            }
        } else if let Some(r) = action.strip_prefix("examine ") {
            self.describe(world, r)
        } else if let Some(r) = action.strip_prefix("go to ") {
            self.agent = Some(r.to_string());
            format!("You arrive at {r}. {}", self.describe(world, r))
        } else if let Some(r) = action.strip_prefix("open ") {
            self.open.insert(r.to_string());
            format!("You open the {r}. {}", self.describe(world, r))
        } else if let Some(r) = action.strip_prefix("close ") {
            self.open.remove(r);
            format!("You close the {r}.")
        } else if let Some(rest) = action.strip_prefix("take ") {
            let (o, r) = rest.split_once(" from ")?;
            self.objects.insert(o.to_string(), Location::Inventory);
            format!("You pick up the {o} from the {r}.")
        } else if let Some(rest) = action.strip_prefix("put ") {
            let (o, r) = rest.split_once(" in/on ")?;
            self.objects
                .insert(o.to_string(), Location::Receptacle(r.to_string()));
            format!("You put the {o} in/on the {r}.")
        } else if let Some(o) = action.strip_prefix("use ") {
            self.lamps_on.insert(o.to_string());
            format!("You turn on the {o}.")
        } else {
            let (verb, rest) = action.split_once(' ')?;
            let (o, r) = rest.split_once(" with ")?;
            let flags = self.flags.get_mut(o)?;
            match verb {
                "clean" => flags.clean = true,
                "heat" => flags.hot = true,
                "cool" => flags.cold = true,
                _ => return None,
            }
            format!("You {verb} the {o} using the {r}.")
        };
        Some(obs)
    }
}

/// Whether the task's goal condition holds.
pub fn check_goal(state: &HouseState, task: &HouseTask) -> bool {
    let of_class = |o: &&String| class_of(o) == task.object_class;
    let in_target = |loc: &Location| match loc {
        Location::Receptacle(r) => class_of(r) == task.target_receptacle,
        Location::Inventory => false,
    };
    let placed_with = |flag: fn(&ObjectFlags) -> bool| {
        state.objects.iter().any(|(o, loc)| {
            of_class(&o) && in_target(loc) && state.flags.get(o).is_some_and(flag)
        })
    };
    match task.family {
        TaskFamily::PickAndPlaceSimple => placed_with(|_| true),
        TaskFamily::PickCleanThenPlaceInRecep => placed_with(|f| f.clean),
        TaskFamily::PickHeatThenPlaceInRecep => placed_with(|f| f.hot),
        TaskFamily::PickCoolThenPlaceInRecep => placed_with(|f| f.cold),
        TaskFamily::LookAtObjInLight => {
            let Some(here) = state.agent.as_deref() else {
                return false;
            };
            let holding = state
                .holding()
                .is_some_and(|o| class_of(o) == task.object_class);
            let lit = state
                .contents(here)
                .iter()
                .any(|o| class_of(o) == LAMP && state.lamps_on.contains(*o));
            holding && lit
        }
        TaskFamily::PickTwoObjAndPlace => {
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for (o, loc) in &state.objects {
                if let Location::Receptacle(r) = loc {
                    if of_class(&o) && class_of(r) == task.target_receptacle {
                        *counts.entry(r.as_str()).or_default() += 1;
                    }
                }
            }
            counts.values().any(|&n| n >= 2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::housesim::{ObjectSpec, ReceptacleSpec};

    pub(crate) fn bathroom() -> WorldSpec {
        let r = |id: &str, openable| ReceptacleSpec {
            id: id.into(),
            openable,
        };
        let o = |id: &str, at: &str| ObjectSpec {
            id: id.into(),
            class: class_of(id).into(),
            location: at.into(),
        };
        WorldSpec {
            receptacles: vec![
                r("cabinet 1", true),
                r("countertop 1", false),
                r("sinkbasin 1", false),
                r("shelf 2", false),
            ],
            objects: vec![
                o("soapbar 1", "countertop 1"),
                o("spraybottle 1", "countertop 1"),
                o("cloth 3", "cabinet 1"),
            ],
            appliances: BTreeSet::from([CLEANER.to_string()]),
        }
    }

    #[test]
    fn take_from_countertop_then_inventory() {
        let w = bathroom();
        let mut s = HouseState::initial(&w);
        let obs = s.apply(&w, "go to countertop 1").unwrap();
        assert_eq!(
            obs,
            "You arrive at countertop 1. On the countertop 1, you see a soapbar 1, and a spraybottle 1."
        );
        assert!(s
            .available_actions(&w)
            .contains(&"take soapbar 1 from countertop 1".to_string()));
        s.apply(&w, "take soapbar 1 from countertop 1").unwrap();
        assert_eq!(s.apply(&w, "inventory").unwrap(), "You are carrying: a soapbar 1.");
    }

    #[test]
    fn closed_receptacle_hides_contents() {
        let w = bathroom();
        let mut s = HouseState::initial(&w);
        s.apply(&w, "go to cabinet 1").unwrap();
        let acts = s.available_actions(&w);
        assert!(acts.contains(&"open cabinet 1".to_string()));
        assert!(!acts.iter().any(|a| a.starts_with("take")));
        s.apply(&w, "open cabinet 1").unwrap();
        assert!(s
            .available_actions(&w)
            .contains(&"take cloth 3 from cabinet 1".to_string()));
    }

    #[test]
    fn clean_cloth_and_place() {
        let w = bathroom();
        let task = HouseTask::new(TaskFamily::PickCleanThenPlaceInRecep, "cloth", "countertop", 424);
        let mut s = HouseState::initial(&w);
        for a in ["go to cabinet 1", "open cabinet 1", "take cloth 3 from cabinet 1", "go to sinkbasin 1"] {
            s.apply(&w, a).unwrap();
        }
        assert!(s
            .available_actions(&w)
            .contains(&"clean cloth 3 with sinkbasin 1".to_string()));
        let mut uncleaned = s.clone();
        s.apply(&w, "clean cloth 3 with sinkbasin 1").unwrap();
        for a in ["go to countertop 1", "put cloth 3 in/on countertop 1"] {
            s.apply(&w, a).unwrap();
            uncleaned.apply(&w, a).unwrap();
        }
        assert!(check_goal(&s, &task));
        assert!(!check_goal(&uncleaned, &task));
    }

    #[test]
    fn revisiting_the_same_place_does_nothing() {
        let w = bathroom();
        let mut s = HouseState::initial(&w);
        s.apply(&w, "go to shelf 2").unwrap();
        let before = s.clone();
        assert!(s.apply(&w, "go to shelf 2").is_none());
        assert_eq!(s, before);
    }
}
