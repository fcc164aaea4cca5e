//! Thin HTTP provider: endpoint plus credential env var, text in, text out.
//!
//! The request contract is a single JSON POST:
//!
//! ```json
//! {"model": "...", "prompt": "...", "temperature": 0.0,
//!  "max_output_tokens": 4096, "stop_sequences": [], "seed": 0}
//! ```
//!
//! and the response must carry the completion under `text` (or
//! `completion`). Anything richer (chat roles, streaming) is a gateway's
//! job; the harness treats every provider as text-in/text-out.

use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use super::{Backend, BackendError, DecodeParams};

pub struct HttpBackend {
    id: String,
    endpoint: String,
    credential_env: Option<String>,
    model: Option<String>,
    seed: Option<u64>,
    timeout: Duration,
    agent: ureq::Agent,
}

impl HttpBackend {
    pub fn new(
        id: impl Into<String>,
        endpoint: impl Into<String>,
        credential_env: Option<String>,
        model: Option<String>,
        seed: Option<u64>,
        timeout: Duration,
    ) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            id: id.into(),
            endpoint: endpoint.into(),
            credential_env,
            model,
            seed,
            timeout,
            agent,
        }
    }

    fn credential(&self) -> Result<Option<String>, BackendError> {
        match &self.credential_env {
            None => Ok(None),
            Some(var) => std::env::var(var)
                .map(Some)
                .map_err(|_| BackendError::MissingCredential(var.clone())),
        }
    }
}

#[derive(Deserialize)]
struct CompletionBody {
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    completion: Option<String>,
}

impl Backend for HttpBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn complete(&self, prompt: &str, params: &DecodeParams) -> Result<String, BackendError> {
        let mut body = json!({
            "prompt": prompt,
            "temperature": params.temperature,
            "max_output_tokens": params.max_output_tokens,
            "stop_sequences": params.stop_sequences,
        });
        if let Some(model) = &self.model {
            body["model"] = json!(model);
        }
        if let Some(seed) = self.seed {
            body["seed"] = json!(seed);
        }
        let mut request = self
            .agent
            .post(&self.endpoint)
            .header("content-type", "application/json");
        if let Some(token) = self.credential()? {
            request = request.header("authorization", format!("Bearer {token}"));
        }
        let mut response = request.send(body.to_string()).map_err(|e| {
            if matches!(e, ureq::Error::Timeout(_)) {
                BackendError::Timeout(self.timeout)
            } else {
                BackendError::Provider {
                    status: None,
                    message: e.to_string(),
                    transient: true,
                }
            }
        })?;
        let status = response.status().as_u16();
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| BackendError::Provider {
                status: Some(status),
                message: format!("failed reading body: {e}"),
                transient: true,
            })?;
        if !(200..300).contains(&status) {
            return Err(BackendError::Provider {
                status: Some(status),
                message: text.chars().take(200).collect(),
                transient: status == 429 || status >= 500,
            });
        }
        let parsed: CompletionBody =
            serde_json::from_str(&text).map_err(|e| BackendError::Provider {
                status: Some(status),
                message: format!("bad response body: {e}"),
                transient: false,
            })?;
        parsed
            .text
            .or(parsed.completion)
            .ok_or_else(|| BackendError::Provider {
                status: Some(status),
                message: "response has neither `text` nor `completion`".into(),
                transient: false,
            })
    }
}
