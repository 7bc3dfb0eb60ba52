use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use super::{CommandRequest, ThoughtRecord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("no JSON object found in response")]
    NoJsonFound,
    #[error("missing field `{0}`")]
    MissingField(String),
}

const THOUGHT_FIELDS: [&str; 4] = ["text", "reasoning", "plan", "criticism"];

/// Every balanced `{...}` region of `raw` that parses as a JSON object, in
/// order of its opening brace. Nested objects are returned after their parent.
///
/// Raw control characters inside string literals are escaped before parsing,
/// since models routinely wrap long strings across lines.
pub fn extract_json_objects(raw: &str) -> Vec<Map<String, Value>> {
    let chars: Vec<(usize, char)> = raw.char_indices().collect();
    let mut found = Vec::new();
    for (pos, &(_, c)) in chars.iter().enumerate() {
        if c != '{' {
            continue;
        }
        if let Some(candidate) = balanced_object(&chars[pos..]) {
            if let Ok(Value::Object(map)) = serde_json::from_str::<Value>(&candidate) {
                found.push(map);
            }
        }
    }
    found
}

fn balanced_object(chars: &[(usize, char)]) -> Option<String> {
    let mut out = String::new();
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for &(_, c) in chars {
        if in_string {
            if escaped {
                escaped = false;
                out.push(c);
            } else if c == '\\' {
                escaped = true;
                out.push(c);
            } else if c == '"' {
                in_string = false;
                out.push(c);
            } else if c.is_control() {
                match c {
                    '\n' => out.push_str("\\n"),
                    '\r' => out.push_str("\\r"),
                    '\t' => out.push_str("\\t"),
                    other => out.push_str(&format!("\\u{:04x}", other as u32)),
                }
            } else {
                out.push(c);
            }
            continue;
        }
        out.push(c);
        match c {
            '"' => in_string = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(out);
                }
            }
            _ => {}
        }
    }
    None
}

fn field_text(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn required<'a>(map: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, ParseError> {
    map.get(key)
        .ok_or_else(|| ParseError::MissingField(path.to_string()))
}

fn required_object<'a>(
    map: &'a Map<String, Value>,
    key: &str,
    path: &str,
) -> Result<&'a Map<String, Value>, ParseError> {
    required(map, key, path)?
        .as_object()
        .ok_or_else(|| ParseError::MissingField(path.to_string()))
}

fn decode(object: &Map<String, Value>) -> Result<(ThoughtRecord, CommandRequest), ParseError> {
    let thoughts = required_object(object, "thoughts", "thoughts")?;
    let mut fields = THOUGHT_FIELDS.iter().map(|key| {
        required(thoughts, key, &format!("thoughts.{key}")).map(field_text)
    });
    let thought = ThoughtRecord {
        text: fields.next().unwrap()?,
        reasoning: fields.next().unwrap()?,
        plan: fields.next().unwrap()?,
        criticism: fields.next().unwrap()?,
    };
    let command = required_object(object, "command", "command")?;
    let name = field_text(required(command, "name", "command.name")?);
    if name.is_empty() {
        return Err(ParseError::MissingField("command.name".into()));
    }
    let args = required_object(command, "args", "command.args")?;
    let tool_input = field_text(required(args, "tool_input", "command.args.tool_input")?);
    Ok((thought, CommandRequest { name, tool_input }))
}

/// Pull the thoughts and command out of a model response.
///
/// The first JSON object carrying both `thoughts` and `command` wins; prose
/// around it is ignored.
pub fn parse_response(raw: &str) -> Result<(ThoughtRecord, CommandRequest), ParseError> {
    let objects = extract_json_objects(raw);
    if let Some(obj) = objects
        .iter()
        .find(|o| o.contains_key("thoughts") && o.contains_key("command"))
    {
        return decode(obj);
    }
    match objects.first() {
        None => Err(ParseError::NoJsonFound),
        Some(first) if !first.contains_key("thoughts") => {
            Err(ParseError::MissingField("thoughts".into()))
        }
        Some(_) => Err(ParseError::MissingField("command".into())),
    }
}

#[derive(Serialize)]
struct WireArgs<'a> {
    tool_input: &'a str,
}

#[derive(Serialize)]
struct WireCommand<'a> {
    name: &'a str,
    args: WireArgs<'a>,
}

#[derive(Serialize)]
struct WireResponse<'a> {
    thoughts: &'a ThoughtRecord,
    command: WireCommand<'a>,
}

/// Render a response in the format `parse_response` expects.
pub fn render_response(thought: &ThoughtRecord, command: &CommandRequest) -> String {
    let wire = WireResponse {
        thoughts: thought,
        command: WireCommand {
            name: &command.name,
            args: WireArgs {
                tool_input: &command.tool_input,
            },
        },
    };
    let mut buf = Vec::new();
    let formatter = serde_json::ser::PrettyFormatter::with_indent(b"    ");
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    wire.serialize(&mut ser).expect("serializing strings cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
