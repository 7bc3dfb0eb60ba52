use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{Product, SearchIndex, ShopError, ShoppingGoal};

/// Immutable product catalog with its search index.
#[derive(Debug, Clone)]
pub struct Catalog {
    products: Vec<Product>,
    index: SearchIndex,
}

impl Catalog {
    pub fn new(products: Vec<Product>) -> Result<Self, ShopError> {
        if products.is_empty() {
            return Err(ShopError::EmptyCatalog);
        }
        let mut seen = HashSet::new();
        for (n, p) in products.iter().enumerate() {
            p.validate().map_err(|message| ShopError::Malformed {
                line: n + 1,
                message,
            })?;
            if !seen.insert(p.id.to_ascii_lowercase()) {
                return Err(ShopError::DuplicateId(p.id.clone()));
            }
        }
        let index = SearchIndex::build(&products);
        Ok(Self { products, index })
    }

    pub fn products(&self) -> &[Product] {
        &self.products
    }

    pub fn len(&self) -> usize {
        self.products.len()
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    /// Position of a product by id, ignoring case.
    pub fn position(&self, id: &str) -> Option<usize> {
        let id = id.trim();
        self.products
            .iter()
            .position(|p| p.id.eq_ignore_ascii_case(id))
    }

    pub fn get(&self, id: &str) -> Option<&Product> {
        self.position(id).map(|i| &self.products[i])
    }

    /// Ranked product positions for a query.
    pub fn search(&self, query: &str) -> Vec<usize> {
        self.index.rank(query, &self.products)
    }
}

struct Template {
    product_type: &'static str,
    nouns: &'static [&'static str],
    attributes: &'static [&'static str],
    options: &'static [(&'static str, &'static [&'static str])],
    price: (f64, f64),
}

const COLORS: &[&str] = &["black", "white", "pink", "grey", "navy blue", "beige", "green", "purple"];

const TEMPLATES: &[Template] = &[
    Template {
        product_type: "storage ottoman",
        nouns: &["storage ottoman", "ottoman bench", "footstool box"],
        attributes: &["faux leather", "folding", "easy install", "memory foam", "tufted", "lid"],
        options: &[("color", COLORS), ("size", &["40x40x40cm", "60x40x40cm", "80x40x40cm", "100x40x40cm"])],
        price: (40.0, 260.0),
    },
    Template {
        product_type: "hair towel",
        nouns: &["hair towel wrap", "hair turban", "hair drying towel"],
        attributes: &["microfiber", "quick drying", "super absorbent", "anti frizz", "button design", "2 pack"],
        options: &[("color", COLORS)],
        price: (4.0, 40.0),
    },
    Template {
        product_type: "running shoes",
        nouns: &["running shoes", "trail sneakers", "athletic shoes"],
        attributes: &["lightweight", "non slip", "breathable mesh", "memory foam insole", "wide fit", "waterproof"],
        options: &[("color", COLORS), ("size", &["7", "8", "9", "10", "11", "12"])],
        price: (30.0, 160.0),
    },
    Template {
        product_type: "wireless headphones",
        nouns: &["wireless headphones", "bluetooth headset", "over ear headphones"],
        attributes: &["noise cancelling", "long battery life", "foldable", "built in microphone", "fast charging", "hi res audio"],
        options: &[("color", COLORS)],
        price: (20.0, 300.0),
    },
    Template {
        product_type: "coffee mug",
        nouns: &["coffee mug", "travel mug", "ceramic cup"],
        attributes: &["dishwasher safe", "microwave safe", "insulated", "leak proof", "stainless steel", "handmade"],
        options: &[("color", COLORS), ("capacity", &["12 oz", "16 oz", "20 oz"])],
        price: (6.0, 45.0),
    },
    Template {
        product_type: "yoga mat",
        nouns: &["yoga mat", "exercise mat", "pilates mat"],
        attributes: &["extra thick", "non slip", "eco friendly", "carrying strap", "tpe", "sweat resistant"],
        options: &[("color", COLORS), ("thickness", &["4mm", "6mm", "8mm", "10mm"])],
        price: (12.0, 90.0),
    },
    Template {
        product_type: "desk lamp",
        nouns: &["desk lamp", "reading light", "table lamp"],
        attributes: &["dimmable", "usb charging port", "eye caring", "touch control", "adjustable arm", "energy saving"],
        options: &[("color", COLORS)],
        price: (15.0, 120.0),
    },
    Template {
        product_type: "phone case",
        nouns: &["phone case", "protective cover", "slim case"],
        attributes: &["shockproof", "wireless charging compatible", "kickstand", "clear back", "card holder", "raised edges"],
        options: &[("color", COLORS), ("model", &["iphone 13", "iphone 14", "galaxy s22", "pixel 7"])],
        price: (5.0, 50.0),
    },
    Template {
        product_type: "backpack",
        nouns: &["backpack", "laptop backpack", "travel daypack"],
        attributes: &["water resistant", "usb charging port", "anti theft", "padded laptop sleeve", "lightweight", "large capacity"],
        options: &[("color", COLORS), ("size", &["small", "medium", "large"])],
        price: (18.0, 150.0),
    },
    Template {
        product_type: "shampoo",
        nouns: &["shampoo", "hair cleanser", "clarifying shampoo"],
        attributes: &["sulfate free", "paraben free", "natural ingredients", "dry scalp", "color safe", "cruelty free"],
        options: &[("scent", &["coconut", "lavender", "mint", "unscented", "argan"]), ("size", &["8 fl oz", "16 fl oz", "32 fl oz"])],
        price: (6.0, 60.0),
    },
];

const BRANDS: &[&str] = &[
    "NIUTA", "VOLO", "QTQHOME", "XMZDDZ", "YZZSJC", "POPCHOSE", "SYMGILA", "ARVANA", "KOVIRA", "LUMEX",
    "TREKLY", "BAXWELL",
];

const REVIEW_LINES: &[&str] = &[
    "Works as described.",
    "Good value for the price.",
    "Arrived quickly and well packed.",
    "Quality is better than expected.",
    "Would buy again.",
    "Smaller than I thought.",
];

fn random_id(rng: &mut ChaCha8Rng) -> String {
    const ALPHABET: &[u8] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    let tail: String = (0..8)
        .map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())] as char)
        .collect();
    format!("B0{tail}")
}

fn pick<'a>(rng: &mut ChaCha8Rng, items: &[&'a str], n: usize) -> Vec<&'a str> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v.truncate(n);
    v
}

fn generate_product(rng: &mut ChaCha8Rng, id: String) -> Product {
    let t = &TEMPLATES[rng.random_range(0..TEMPLATES.len())];
    let brand = BRANDS.choose(rng).expect("nonempty");
    let noun = t.nouns.choose(rng).expect("nonempty");
    let n_attrs = rng.random_range(2..=4);
    let attrs = pick(rng, t.attributes, n_attrs);
    // Only the first one or two attributes make it into the title.
    let visible = rng.random_range(1..=2).min(attrs.len());
    let title = format!("{brand} {} {noun}", attrs[..visible].join(" "));

    let mut options = BTreeMap::new();
    for (name, values) in t.options {
        let n = rng.random_range(2..=values.len().min(4));
        let mut chosen: Vec<String> = pick(rng, values, n).into_iter().map(String::from).collect();
        chosen.sort();
        options.insert(name.to_string(), chosen);
    }

    let (lo, hi) = t.price;
    let price = (rng.random_range(lo..hi) * 100.0).round() / 100.0;
    let reviews = pick(rng, REVIEW_LINES, 2).join(" ");

    Product {
        id,
        description: format!(
            "This {} from {brand} is {}.",
            t.product_type,
            attrs.join(", ")
        ),
        features: options
            .iter()
            .map(|(k, v)| format!("Available {k}: {}.", v.join(", ")))
            .collect::<Vec<_>>()
            .join(" "),
        reviews,
        title,
        price: price.max(0.01),
        options,
        attributes: attrs.into_iter().map(String::from).collect(),
        product_type: t.product_type.to_string(),
    }
}

/// Deterministic synthetic catalog of `n` products.
pub fn gen_catalog(seed: u64, n: usize) -> Result<Catalog, ShopError> {
    if n == 0 {
        return Err(ShopError::EmptyCatalog);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids = HashSet::new();
    let mut products = Vec::with_capacity(n);
    while products.len() < n {
        let id = random_id(&mut rng);
        if ids.insert(id.clone()) {
            products.push(generate_product(&mut rng, id));
        }
    }
    Catalog::new(products)
}

fn article(word: &str) -> &'static str {
    match word.chars().next() {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    }
}

/// Deterministic goals, each built around one catalog product so a perfect
/// purchase always exists.
pub fn gen_goals(catalog: &Catalog, seed: u64, n: usize) -> Vec<ShoppingGoal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_900a_1500_0000);
    (0..n)
        .map(|i| {
            let p = &catalog.products()[rng.random_range(0..catalog.len())];
            let attrs: Vec<&String> = p.attributes.iter().collect();
            let k = rng.random_range(1..=attrs.len().min(3));
            let mut required: Vec<&String> = attrs.choose_multiple(&mut rng, k).copied().collect();
            required.sort();

            let mut required_options = BTreeMap::new();
            for (name, values) in &p.options {
                if rng.random_bool(0.8) {
                    let v = values.choose(&mut rng).expect("nonempty option");
                    required_options.insert(name.clone(), v.clone());
                }
            }
            let cap = (p.price * rng.random_range(1.05..1.5)).ceil();

            let attr_text = required
                .iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
                .join(" and ");
            let mut instruction = format!(
                "i want {} {attr_text} {}",
                article(&attr_text),
                p.product_type
            );
            if !required_options.is_empty() {
                let opts: Vec<String> = required_options
                    .iter()
                    .map(|(k, v)| format!("{k} {v}"))
                    .collect();
                instruction.push_str(&format!(" with {}", opts.join(" and ")));
            }
            instruction.push_str(&format!(", and price lower than {cap:.2} dollars"));

            ShoppingGoal {
                id: format!("shop-{i}"),
                instruction,
                required_attributes: required.into_iter().cloned().collect::<BTreeSet<_>>(),
                required_options,
                price_cap: cap,
                target_type: p.product_type.clone(),
            }
        })
        .collect()
}

fn read_jsonl<T: DeserializeOwned, R: BufRead>(reader: R) -> Result<Vec<T>, ShopError> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| ShopError::Malformed {
            line: n + 1,
            message: e.to_string(),
        })?;
        out.push(item);
    }
    Ok(out)
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog, ShopError> {
    let file = std::fs::File::open(path)?;
    Catalog::new(read_jsonl(std::io::BufReader::new(file))?)
}

/// Goals in file order.
pub fn load_goals(path: impl AsRef<Path>) -> Result<Vec<ShoppingGoal>, ShopError> {
    let file = std::fs::File::open(path)?;
    let goals: Vec<ShoppingGoal> = read_jsonl(std::io::BufReader::new(file))?;
    for (n, g) in goals.iter().enumerate() {
        g.validate().map_err(|e| ShopError::Malformed {
            line: n + 1,
            message: e.to_string(),
        })?;
    }
    Ok(goals)
}

pub fn write_jsonl<T: Serialize, W: Write>(items: &[T], mut out: W) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
