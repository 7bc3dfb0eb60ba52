use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    class_of, solve, HouseError, HouseState, HouseTask, ObjectSpec, ReceptacleSpec, TaskFamily,
    WorldSpec, AGENT_STEP_CAP, CLEANER, COOLER, HEATER, LAMP,
};

/// One line of a task file: the task and the world it is played in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub task: HouseTask,
    pub world: WorldSpec,
}

struct Room {
    receptacles: &'static [(&'static str, bool)],
    objects: &'static [&'static str],
    /// Target receptacle classes for placement tasks.
    targets: &'static [&'static str],
    /// Receptacle classes where the lamp may stand.
    lamp_on: &'static [&'static str],
}

const KITCHEN: Room = Room {
    receptacles: &[
        ("cabinet 1", true), ("cabinet 2", true), ("cabinet 3", true), ("countertop 1", false),
        ("countertop 2", false), ("diningtable 1", false), ("drawer 1", true), ("drawer 2", true),
        ("fridge 1", true), ("garbagecan 1", false), ("microwave 1", true), ("sinkbasin 1", false),
    ],
    objects: &["apple", "cup", "egg", "knife", "mug", "pan", "peppershaker", "plate", "potato", "saltshaker", "spatula"],
    targets: &["cabinet", "countertop", "diningtable", "drawer"],
    lamp_on: &[],
};

const BATHROOM: Room = Room {
    receptacles: &[
        ("cabinet 4", true), ("cabinet 3", true), ("cabinet 2", true), ("cabinet 1", true),
        ("countertop 1", false), ("garbagecan 1", false), ("handtowelholder 2", false),
        ("handtowelholder 1", false), ("sinkbasin 1", false), ("toilet 1", false),
        ("toiletpaperhanger 1", false), ("towelholder 1", false),
    ],
    objects: &["candle", "cloth", "handtowel", "soapbar", "soapbottle", "spraybottle", "toiletpaper"],
    targets: &["cabinet", "countertop", "garbagecan", "toilet"],
    lamp_on: &[],
};

const BEDROOM: Room = Room {
    receptacles: &[
        ("bed 1", false), ("desk 2", false), ("desk 1", false), ("drawer 3", true), ("drawer 2", true),
        ("drawer 1", true), ("garbagecan 1", false), ("safe 1", true), ("shelf 4", false),
        ("shelf 3", false), ("shelf 2", false), ("shelf 1", false),
    ],
    objects: &["book", "cd", "cellphone", "creditcard", "keychain", "mug", "pen", "pencil", "watch"],
    targets: &["desk", "drawer", "safe", "shelf"],
    lamp_on: &["desk"],
};

/// Object classes that make sense for each family in each room.
fn family_rooms(family: TaskFamily) -> Vec<(&'static Room, &'static [&'static str])> {
    match family {
        TaskFamily::PickAndPlaceSimple | TaskFamily::PickTwoObjAndPlace => vec![
            (&KITCHEN, &["apple", "cup", "knife", "mug", "peppershaker", "saltshaker", "spatula"][..]),
            (&BATHROOM, &["candle", "cloth", "soapbar", "soapbottle", "spraybottle", "toiletpaper"][..]),
            (&BEDROOM, &["book", "cd", "cellphone", "creditcard", "keychain", "pen", "pencil", "watch"][..]),
        ],
        TaskFamily::PickCleanThenPlaceInRecep => vec![
            (&KITCHEN, &["knife", "mug", "pan", "plate", "spatula"][..]),
            (&BATHROOM, &["cloth", "soapbar"][..]),
        ],
        TaskFamily::PickHeatThenPlaceInRecep => vec![(&KITCHEN, &["apple", "cup", "egg", "mug", "potato"][..])],
        TaskFamily::PickCoolThenPlaceInRecep => vec![(&KITCHEN, &["apple", "cup", "mug", "pan", "potato"][..])],
        TaskFamily::LookAtObjInLight => vec![(&BEDROOM, &["book", "cd", "cellphone", "creditcard", "mug", "pen"][..])],
    }
}

fn appliances_of(room: &Room) -> BTreeSet<String> {
    let mut set: BTreeSet<String> = room
        .receptacles
        .iter()
        .map(|(id, _)| class_of(id))
        .filter(|c| [CLEANER, HEATER, COOLER].contains(c))
        .map(String::from)
        .collect();
    if !room.lamp_on.is_empty() {
        set.insert(LAMP.to_string());
    }
    set
}

fn build(rng: &mut ChaCha8Rng, family: TaskFamily, number: usize) -> TaskInstance {
    let (room, classes) = *family_rooms(family).choose(rng).expect("family has rooms");
    let object_class = *classes.choose(rng).expect("nonempty");
    let target = if family == TaskFamily::LookAtObjInLight {
        LAMP
    } else {
        room.targets.choose(rng).expect("nonempty")
    };

    // Target-class objects never start in a target-class receptacle, so no
    // task is solved at reset.
    let storage: Vec<&str> = room
        .receptacles
        .iter()
        .map(|(id, _)| *id)
        .filter(|id| ![CLEANER, HEATER, COOLER].contains(&class_of(id)))
        .collect();
    let start_spots: Vec<&str> = storage
        .iter()
        .copied()
        .filter(|id| class_of(id) != target)
        .collect();

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut objects = Vec::new();
    let mut place = |class: &'static str, spots: &[&str], rng: &mut ChaCha8Rng| {
        let n = counts.entry(class).or_default();
        *n += 1;
        objects.push(ObjectSpec {
            id: format!("{class} {n}"),
            class: class.to_string(),
            location: spots.choose(rng).expect("nonempty").to_string(),
        });
    };

    let n_target = match family {
        TaskFamily::PickTwoObjAndPlace => rng.random_range(2..=3),
        _ => rng.random_range(1..=2),
    };
    for _ in 0..n_target {
        place(object_class, &start_spots, rng);
    }
    let distractors: Vec<&'static str> = room
        .objects
        .iter()
        .copied()
        .filter(|c| *c != object_class)
        .collect();
    for _ in 0..rng.random_range(3..=6) {
        let class = *distractors.choose(rng).expect("nonempty");
        place(class, &storage, rng);
    }
    if let Some(class) = room.lamp_on.choose(rng) {
        let spots: Vec<&str> = storage
            .iter()
            .copied()
            .filter(|id| class_of(id) == *class)
            .collect();
        place(LAMP, &spots, rng);
    }

    TaskInstance {
        task: HouseTask::new(family, object_class, target, number),
        world: WorldSpec {
            receptacles: room
                .receptacles
                .iter()
                .map(|(id, openable)| ReceptacleSpec {
                    id: id.to_string(),
                    openable: *openable,
                })
                .collect(),
            objects,
            appliances: appliances_of(room),
        },
    }
}

/// Deterministic task suite cycling through the six families in order. Every
/// task is checked solvable within the agent step cap.
pub fn gen_tasks(seed: u64, n: usize) -> Result<Vec<TaskInstance>, HouseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let family = TaskFamily::ALL[i % TaskFamily::ALL.len()];
        let mut attempts = 0;
        let inst = loop {
            let inst = build(&mut rng, family, i + 1);
            inst.world.validate()?;
            let start = HouseState::initial(&inst.world);
            if solve(&inst.world, &inst.task, &start, AGENT_STEP_CAP).is_some_and(|p| !p.is_empty()) {
                break inst;
            }
            attempts += 1;
            if attempts > 100 {
                return Err(HouseError::Unsolvable(inst.task.id));
            }
        };
        out.push(inst);
    }
    Ok(out)
}

/// Tasks in file order; each is validated and checked solvable.
pub fn load_tasks(path: impl AsRef<Path>) -> Result<Vec<TaskInstance>, HouseError> {
    let reader = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| HouseError::Malformed {
            line: n + 1,
            message,
        };
        let inst: TaskInstance = serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
        inst.world.validate().map_err(|e| malformed(e.to_string()))?;
        inst.task.validate().map_err(|e| malformed(e.to_string()))?;
        let start = HouseState::initial(&inst.world);
        if solve(&inst.world, &inst.task, &start, 64).is_none_or(|p| p.is_empty()) {
            return Err(malformed(format!("task {} is unsolvable", inst.task.id)));
        }
        out.push(inst);
    }
    Ok(out)
}

pub fn write_tasks<W: Write>(tasks: &[TaskInstance], mut out: W) -> std::io::Result<()> {
    for t in tasks {
        serde_json::to_writer(&mut out, t)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_of_each_family_and_deterministic() {
        let a = gen_tasks(42, 12).unwrap();
        assert_eq!(a, gen_tasks(42, 12).unwrap());
        for f in TaskFamily::ALL {
            assert_eq!(a.iter().filter(|t| t.task.family == f).count(), 2);
        }
        for t in &a {
            t.task.validate().unwrap();
            assert!(t.world.receptacles.len() <= 12);
        }
    }

    #[test]
    fn file_round_trip_and_unsolvable_rejected() {
        let tasks = gen_tasks(1, 6).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tasks.jsonl");
        write_tasks(&tasks, std::fs::File::create(&path).unwrap()).unwrap();
        assert_eq!(load_tasks(&path).unwrap(), tasks);

        let mut broken = tasks[0].clone();
        broken.world.objects.retain(|o| o.class != broken.task.object_class);
        write_tasks(&[broken], std::fs::File::create(&path).unwrap()).unwrap();
        assert!(matches!(load_tasks(&path), Err(HouseError::Malformed { line: 1, .. })));
    }
}
