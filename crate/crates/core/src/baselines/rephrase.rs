use super::BaselineRun;
use crate::augment::parse_numbered_list;
use crate::corpus::LabeledText;
use crate::error::{Error, Result};
use crate::llm::{ChatRequest, FinishReason, Gateway, GatewayError};

pub const METHOD_NAME: &str = "rephrase";

pub fn rephrase_prompt(text: &str, n: usize) -> String {
    format!("In a numbered list, rephrase the following text {n} times.\n\"{text}\"")
}

/// Asks the LLM for `n` rephrasings of one datapoint; labels are copied.
pub fn rephrase_augment(item: &LabeledText, n: usize, gateway: &Gateway) -> Result<BaselineRun> {
    if item.text.trim().is_empty() {
        return Err(Error::InvalidArgument(format!("item {} has empty text", item.id)));
    }
    let mut run = BaselineRun {
        prompts: 1,
        ..BaselineRun::default()
    };
    let response = match gateway.complete(&ChatRequest::generation(rephrase_prompt(&item.text, n))) {
        Ok(r) => r,
        Err(e @ (GatewayError::MissingCredential | GatewayError::Unauthorized(_))) => return Err(e.into()),
        Err(e) => {
            run.failures.push(format!("{}: {e}", item.id));
            return Ok(run);
        }
    };
    if !matches!(response.finish_reason, FinishReason::Complete | FinishReason::Truncated) {
        log::info!("rephrase of {} returned {:?}", item.id, response.finish_reason);
        run.failures.push(format!("{}: response {:?}", item.id, response.finish_reason));
        return Ok(run);
    }
    match parse_numbered_list(&response.text, n) {
        Ok(parsed) => {
            run.items = parsed
                .items
                .into_iter()
                .map(|text| LabeledText::augmented(text, item.label.clone(), METHOD_NAME, vec![item.id.clone()]))
                .collect();
        }
        Err(e) => {
            log::info!("rephrase of {} unparsable: {e}", item.id);
            run.failures.push(format!("{}: {e}", item.id));
        }
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::{BackendError, ClosureBackend};

    fn gateway(reply: impl Fn(&str) -> String + Send + Sync + 'static) -> Gateway {
        Gateway::new(ClosureBackend::new(move |req: &ChatRequest| -> Result<String, BackendError> {
            Ok(reply(&req.user_text))
        }))
    }

    #[test]
    fn labels_copied_from_source() {
        let item = LabeledText::original("Sounds like a stable police officer.", "Sarcasm");
        let gw = gateway(|_| (1..=5).map(|i| format!("{i}. version {i}")).collect::<Vec<_>>().join("\n"));
        let run = rephrase_augment(&item, 5, &gw).unwrap();
        assert_eq!(run.items.len(), 5);
        assert!(run.items.iter().all(|t| t.label == "Sarcasm" && t.source_ids == vec![item.id.clone()]));
        assert!(run.failures.is_empty());
    }

    #[test]
    fn refusal_yields_nothing() {
        let item = LabeledText::original("you clown", "Harassment");
        let gw = gateway(|_| "I cannot help with generating harassment.".into());
        let run = rephrase_augment(&item, 5, &gw).unwrap();
        assert!(run.items.is_empty());
        assert_eq!(run.failures.len(), 1);
    }

    #[test]
    fn echo_is_allowed() {
        let item = LabeledText::original("nice phone", "Teasing");
        let gw = gateway(|prompt| format!("1. {}", prompt.lines().nth(1).unwrap_or("")));
        let run = rephrase_augment(&item, 1, &gw).unwrap();
        assert_eq!(run.items.len(), 1);
        assert_eq!(run.items[0].text, "nice phone");
    }
}
