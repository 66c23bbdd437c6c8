// The chat gateway with a scripted backend, and optionally a live endpoint.
//
//     cargo run --example mock_gateway
//     PROMPTAUG_API_KEY=... cargo run --example mock_gateway -- http://host/v1/chat/completions model

use std::time::Duration;

use promptaug::llm::{ChatRequest, Gateway, HttpBackend, Matcher, MockEntry, MockReply, MockScript, RetryPolicy};

fn main() -> promptaug::Result<()> {
    run_example()?;
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let [url, model] = args.as_slice() {
        let gw = Gateway::new(HttpBackend::from_env(url, model, Duration::from_secs(60))?);
        let reply = gw.complete(&ChatRequest::generation("In a numbered list, write 2 new greetings."))?;
        println!("live reply after {} attempt(s):\n{}", reply.attempt_count, reply.text);
    }
    Ok(())
}

pub fn run_example() -> promptaug::Result<()> {
    let script = MockScript {
        entries: vec![
            // the first two calls hit a rate limit
            MockEntry { matcher: Matcher::Index(0), reply: MockReply::status(429) },
            MockEntry { matcher: Matcher::Index(1), reply: MockReply::status(429) },
            MockEntry {
                matcher: Matcher::Contains("numbered list".into()),
                reply: MockReply::text("1. hello there\n2. hi all"),
            },
        ],
        default: Some(MockReply::text("Yes.")),
    };
    let gw = Gateway::builder(promptaug::llm::ScriptedBackend::new(script))
        .retry(RetryPolicy { max_retries: 3, base_delay: Duration::from_millis(5) })
        .build();

    let reply = gw.complete(&ChatRequest::generation("In a numbered list, write 2 new greetings."))?;
    println!("{} attempt(s): {:?}", reply.attempt_count, reply.text);
    let verdict = gw.complete_yes_no(&ChatRequest::judgement("Is this polite? Answer yes or no."))?;
    println!("judgement: {:?}", verdict.answer);
    println!("{} requests, {} attempts", gw.request_count(), gw.attempt_count());
    Ok(())
}
