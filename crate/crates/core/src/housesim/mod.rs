//! Desk-scale household text world: receptacles holding objects, a handful of
//! appliances, six task families and binary success.

mod env;
mod gen;
mod solver;
mod state;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use env::{HouseEnv, FINISH_TOOL, NOTHING_HAPPENS};
pub use gen::{gen_tasks, load_tasks, write_tasks, TaskInstance};
pub use solver::{reachable_states, solve};
pub use state::{check_goal, HouseState, Location, ObjectFlags};

/// Agent-run step cap.
pub const AGENT_STEP_CAP: usize = 35;
/// Expert-only rollout step cap.
pub const EXPERT_STEP_CAP: usize = 50;

/// Receptacle classes that process a held object.
pub const CLEANER: &str = "sinkbasin";
pub const HEATER: &str = "microwave";
pub const COOLER: &str = "fridge";
/// Object class that lights the room for look-at tasks; fixed in place.
pub const LAMP: &str = "desklamp";

/// Class part of an instance id: `"cabinet 4"` → `"cabinet"`.
pub fn class_of(id: &str) -> &str {
    id.rsplit_once(' ').map_or(id, |(c, _)| c)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReceptacleSpec {
    pub id: String,
    pub openable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub id: String,
    pub class: String,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldSpec {
    pub receptacles: Vec<ReceptacleSpec>,
    pub objects: Vec<ObjectSpec>,
    pub appliances: BTreeSet<String>,
}

impl WorldSpec {
    pub fn validate(&self) -> Result<(), HouseError> {
        let mut ids = BTreeSet::new();
        for r in &self.receptacles {
            if !ids.insert(r.id.as_str()) {
                return Err(HouseError::InvalidWorld(format!("duplicate id {}", r.id)));
            }
        }
        for o in &self.objects {
            if !ids.insert(o.id.as_str()) {
                return Err(HouseError::InvalidWorld(format!("duplicate id {}", o.id)));
            }
            if class_of(&o.id) != o.class {
                return Err(HouseError::InvalidWorld(format!(
                    "object {} does not match class {}",
                    o.id, o.class
                )));
            }
            if self.receptacle(&o.location).is_none() {
                return Err(HouseError::InvalidWorld(format!(
                    "object {} starts in undeclared receptacle {}",
                    o.id, o.location
                )));
            }
        }
        for a in &self.appliances {
            let present = if a == LAMP {
                self.objects.iter().any(|o| o.class == LAMP)
            } else if [CLEANER, HEATER, COOLER].contains(&a.as_str()) {
                self.receptacles.iter().any(|r| class_of(&r.id) == a)
            } else {
                false
            };
            if !present {
                return Err(HouseError::InvalidWorld(format!("appliance {a} missing")));
            }
        }
        Ok(())
    }

    pub fn receptacle(&self, id: &str) -> Option<&ReceptacleSpec> {
        self.receptacles.iter().find(|r| r.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskFamily {
    PickAndPlaceSimple,
    PickCleanThenPlaceInRecep,
    PickHeatThenPlaceInRecep,
    PickCoolThenPlaceInRecep,
    LookAtObjInLight,
    PickTwoObjAndPlace,
}

impl TaskFamily {
    pub const ALL: [TaskFamily; 6] = [
        TaskFamily::PickAndPlaceSimple,
        TaskFamily::PickCleanThenPlaceInRecep,
        TaskFamily::PickHeatThenPlaceInRecep,
        TaskFamily::PickCoolThenPlaceInRecep,
        TaskFamily::LookAtObjInLight,
        TaskFamily::PickTwoObjAndPlace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskFamily::PickAndPlaceSimple => "pick_and_place_simple",
            TaskFamily::PickCleanThenPlaceInRecep => "pick_clean_then_place_in_recep",
            TaskFamily::PickHeatThenPlaceInRecep => "pick_heat_then_place_in_recep",
            TaskFamily::PickCoolThenPlaceInRecep => "pick_cool_then_place_in_recep",
            TaskFamily::LookAtObjInLight => "look_at_obj_in_light",
            TaskFamily::PickTwoObjAndPlace => "pick_two_obj_and_place",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Appliance class the object must be processed with, if any.
    pub fn appliance(self) -> Option<&'static str> {
        match self {
            TaskFamily::PickCleanThenPlaceInRecep => Some(CLEANER),
            TaskFamily::PickHeatThenPlaceInRecep => Some(HEATER),
            TaskFamily::PickCoolThenPlaceInRecep => Some(COOLER),
            TaskFamily::LookAtObjInLight => Some(LAMP),
            _ => None,
        }
    }
}

impl fmt::Display for TaskFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HouseTask {
    pub id: String,
    pub family: TaskFamily,
    /// Lowercase object class, e.g. `soapbar`.
    pub object_class: String,
    /// Lowercase receptacle class, e.g. `countertop`; `desklamp` for look-at
    /// tasks.
    pub target_receptacle: String,
}

const CAMEL: &[(&str, &str)] = &[
    ("alarmclock", "AlarmClock"),
    ("cellphone", "CellPhone"),
    ("coffeetable", "CoffeeTable"),
    ("countertop", "CounterTop"),
    ("creditcard", "CreditCard"),
    ("desklamp", "DeskLamp"),
    ("diningtable", "DiningTable"),
    ("garbagecan", "GarbageCan"),
    ("handtowel", "HandTowel"),
    ("keychain", "KeyChain"),
    ("peppershaker", "PepperShaker"),
    ("saltshaker", "SaltShaker"),
    ("sinkbasin", "SinkBasin"),
    ("soapbar", "SoapBar"),
    ("soapbottle", "SoapBottle"),
    ("spraybottle", "SprayBottle"),
    ("toiletpaper", "ToiletPaper"),
];

/// Display form used in task ids: `countertop` → `CounterTop`.
pub fn camel_name(class: &str) -> String {
    if let Some((_, c)) = CAMEL.iter().find(|(k, _)| *k == class) {
        return c.to_string();
    }
    let mut chars = class.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

impl HouseTask {
    pub fn new(family: TaskFamily, object_class: &str, target_receptacle: &str, number: usize) -> Self {
        Self {
            id: format!(
                "{}-{}-None-{}-{number}",
                family.name(),
                camel_name(object_class),
                camel_name(target_receptacle)
            ),
            family,
            object_class: object_class.to_string(),
            target_receptacle: target_receptacle.to_string(),
        }
    }

    /// Checks the `<family>-<Object>-None-<Receptacle>-<number>` id shape.
    pub fn validate(&self) -> Result<(), HouseError> {
        let bad = || HouseError::InvalidTask(format!("malformed task id {:?}", self.id));
        let parts: Vec<&str> = self.id.split('-').collect();
        let [family, object, none, recep, number] = parts.as_slice() else {
            return Err(bad());
        };
        let camel_ok = |s: &str| {
            s.chars().next().is_some_and(|c| c.is_ascii_uppercase())
                && s.chars().all(|c| c.is_ascii_alphanumeric())
        };
        if *family != self.family.name()
            || !camel_ok(object)
            || *none != "None"
            || !camel_ok(recep)
            || number.is_empty()
            || !number.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        if !object.eq_ignore_ascii_case(&self.object_class)
            || !recep.eq_ignore_ascii_case(&self.target_receptacle)
        {
            return Err(bad());
        }
        Ok(())
    }

    /// Task sentence shown after "Your task is to: ".
    pub fn sentence(&self) -> String {
        let (o, r) = (&self.object_class, &self.target_receptacle);
        match self.family {
            TaskFamily::PickAndPlaceSimple => format!("put some {o} in {r}."),
            TaskFamily::PickCleanThenPlaceInRecep => format!("clean some {o} and put it in {r}."),
            TaskFamily::PickHeatThenPlaceInRecep => format!("heat some {o} and put it in {r}."),
            TaskFamily::PickCoolThenPlaceInRecep => format!("cool some {o} and put it in {r}."),
            TaskFamily::LookAtObjInLight => format!("examine the {o} with the desklamp."),
            TaskFamily::PickTwoObjAndPlace => format!("put two {o} in {r}."),
        }
    }
}

#[derive(Debug, Error)]
pub enum HouseError {
    #[error("invalid world: {0}")]
    InvalidWorld(String),
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("task {0} cannot be solved in this world")]
    Unsolvable(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
