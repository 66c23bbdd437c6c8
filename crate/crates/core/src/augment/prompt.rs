use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{ClassSpec, LabeledText};
use crate::error::{Error, Result};

/// Which prompt component, if any, is left out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptVariant {
    Full,
    NoExamples,
    NoDefinition,
    NoContext,
}

impl PromptVariant {
    pub const ALL: [PromptVariant; 4] = [
        PromptVariant::Full,
        PromptVariant::NoExamples,
        PromptVariant::NoDefinition,
        PromptVariant::NoContext,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PromptVariant::Full => "full",
            PromptVariant::NoExamples => "no_examples",
            PromptVariant::NoDefinition => "no_definition",
            PromptVariant::NoContext => "no_context",
        }
    }

    /// Row label used in ablation tables.
    pub fn display_name(self) -> &'static str {
        match self {
            PromptVariant::Full => "PromptAug",
            PromptVariant::NoExamples => "PromptAug No Examples",
            PromptVariant::NoDefinition => "PromptAug No Definition",
            PromptVariant::NoContext => "PromptAug No Context",
        }
    }

    pub fn uses_examples(self) -> bool {
        self != PromptVariant::NoExamples
    }

    /// The component this variant drops.
    pub fn omitted(self) -> Option<Component> {
        match self {
            PromptVariant::Full => None,
            PromptVariant::NoExamples => Some(Component::Examples),
            PromptVariant::NoDefinition => Some(Component::Definition),
            PromptVariant::NoContext => Some(Component::Context),
        }
    }
}

impl fmt::Display for PromptVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PromptVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PromptVariant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown prompt variant {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Instruction,
    Context,
    Examples,
    Definition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptSegment {
    pub component: Component,
    pub text: String,
}

/// A rendered generation prompt and what went into it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub class: ClassSpec,
    pub examples: Vec<LabeledText>,
    pub variant: PromptVariant,
    pub segments: Vec<PromptSegment>,
    pub rendered: String,
    pub n_requested: usize,
}

impl PromptBundle {
    pub fn has(&self, component: Component) -> bool {
        self.segments.iter().any(|s| s.component == component)
    }

    pub fn example_ids(&self) -> Vec<String> {
        self.examples.iter().map(|e| e.id.clone()).collect()
    }
}

pub const CONTEXT_TEXT: &str = " directed at other users.";
pub const EXAMPLES_LEAD: &str = " Here are some examples;";

pub fn instruction_text(n: usize, class_name: &str, with_context: bool) -> String {
    if with_context {
        format!("In a numbered list, write {n} new social media comments containing {class_name}")
    } else {
        format!("In a numbered list, write {n} new comments containing {class_name}.")
    }
}

pub fn examples_text(examples: &[LabeledText]) -> String {
    let quoted: Vec<String> = examples.iter().map(|e| format!("\"{}\"", e.text)).collect();
    format!("{EXAMPLES_LEAD}\n\n{}", quoted.join(",\n"))
}

pub fn definition_text(class: &ClassSpec) -> String {
    format!("\n\n{} is defined as; {}", class.name, class.characteristic())
}

/// Assembles Instruction, Context, Examples and Definition in that order,
/// leaving out the component the variant names. Dropping the context also
/// removes "social media" from the instruction.
pub fn build_prompt(
    class: &ClassSpec,
    examples: &[LabeledText],
    n: usize,
    variant: PromptVariant,
) -> Result<PromptBundle> {
    if n == 0 {
        return Err(Error::Prompt("n must be positive".into()));
    }
    if variant.uses_examples() && examples.is_empty() {
        return Err(Error::Prompt(format!("variant {variant} needs at least one example")));
    }
    if !variant.uses_examples() && !examples.is_empty() {
        return Err(Error::Prompt("variant no_examples takes no examples".into()));
    }
    if let Some(stray) = examples.iter().find(|e| e.label != class.name) {
        return Err(Error::Prompt(format!(
            "example {} is labelled {:?}, not {:?}",
            stray.id, stray.label, class.name
        )));
    }
    if variant != PromptVariant::NoDefinition && class.characteristic().is_empty() {
        return Err(Error::Prompt(format!("class {:?} has no definition", class.name)));
    }

    let with_context = variant != PromptVariant::NoContext;
    let mut segments = vec![PromptSegment {
        component: Component::Instruction,
        text: instruction_text(n, &class.name, with_context),
    }];
    if with_context {
        segments.push(PromptSegment {
            component: Component::Context,
            text: CONTEXT_TEXT.to_string(),
        });
    }
    if variant.uses_examples() {
        segments.push(PromptSegment {
            component: Component::Examples,
            text: examples_text(examples),
        });
    }
    if variant != PromptVariant::NoDefinition {
        segments.push(PromptSegment {
            component: Component::Definition,
            text: definition_text(class),
        });
    }
    let rendered = segments.iter().map(|s| s.text.as_str()).collect();
    Ok(PromptBundle {
        class: class.clone(),
        examples: examples.to_vec(),
        variant,
        segments,
        rendered,
        n_requested: n,
    })
}
