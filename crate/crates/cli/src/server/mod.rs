//! The stateful validation service: `POST /configure` uploads a file and
//! opens a session, `POST /validate` selects modules (returning either the
//! precondition questions or, with `useDefaults`, the finished report) and
//! `POST /result` answers the questions and returns the report. Completed
//! sessions replay their stored report byte for byte until they expire.
//!
//! Sessions live in memory only; uploaded bytes are never written to disk.

mod sessions;

pub use sessions::{Session, SessionState, SessionStore};

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::{DefaultBodyLimit, Multipart, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use dcv_core::deident::{deidentify_with, strip_pixel_data, DeidentProfile, UidMap};
use dcv_core::description::Registry;
use dcv_core::validate::{collect_questions, report_to_json, validate, Answers, Selection};

#[derive(Clone)]
pub struct ServerOptions {
    pub session_ttl: Duration,
    pub max_upload: usize,
    pub server_deident: bool,
}

impl Default for ServerOptions {
    fn default() -> Self {
        ServerOptions {
            session_ttl: Duration::from_secs(30 * 60),
            max_upload: 64 << 20,
            server_deident: false,
        }
    }
}

#[derive(Clone)]
struct AppState {
    registry: Arc<Registry>,
    sessions: Arc<SessionStore>,
    server_deident: bool,
}

pub fn build_router(registry: Arc<Registry>, options: ServerOptions) -> Router {
    let state = AppState {
        registry,
        sessions: Arc::new(SessionStore::new(options.session_ttl)),
        server_deident: options.server_deident,
    };
    Router::new()
        .route("/configure", post(configure))
        .route("/validate", post(validate_endpoint))
        .route("/result", post(result_endpoint))
        .route("/health", get(health))
        .layer(DefaultBodyLimit::max(options.max_upload))
        .layer(axum::middleware::from_fn(log_requests))
        .with_state(state)
}

/// Response extension carrying the session id prefix for the request log.
#[derive(Clone)]
struct SessionTag(String);

async fn log_requests(
    req: axum::extract::Request,
    next: axum::middleware::Next,
) -> Response {
    let method = req.method().clone();
    let path = req.uri().path().to_string();
    let response = next.run(req).await;
    let session = response
        .extensions()
        .get::<SessionTag>()
        .map(|t| t.0.clone())
        .unwrap_or_else(|| "-".to_string());
    tracing::info!("{} {} {} session={}", method, path, response.status().as_u16(), session);
    response
}

fn session_tag(id: &str) -> SessionTag {
    SessionTag(id.chars().take(8).collect())
}

struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({"error": self.code, "message": self.message});
        (self.status, Json(body)).into_response()
    }
}

fn json_response(body: String) -> Response {
    (
        [(axum::http::header::CONTENT_TYPE, "application/json")],
        body,
    )
        .into_response()
}

async fn health() -> Response {
    json_response("{\"status\":\"ok\"}".to_string())
}

#[derive(Serialize)]
struct ConfigureResponse {
    #[serde(rename = "validationId")]
    validation_id: String,
    #[serde(rename = "sopClassUid")]
    sop_class_uid: String,
    #[serde(rename = "iodName")]
    iod_name: String,
    modules: Vec<ModuleEntry>,
    options: ConfigureOptions,
}

#[derive(Serialize)]
struct ModuleEntry {
    name: String,
    ie: String,
    usage: &'static str,
}

#[derive(Serialize)]
struct ConfigureOptions {
    #[serde(rename = "useDefaultsAvailable")]
    use_defaults_available: bool,
}

async fn configure(
    State(state): State<AppState>,
    mut multipart: Multipart,
) -> Result<Response, ApiError> {
    let mut file_bytes: Option<Vec<u8>> = None;
    while let Some(field) = multipart.next_field().await.map_err(|e| {
        ApiError::new(e.status(), "BAD_MULTIPART", e.body_text())
    })? {
        if field.name() == Some("file") {
            let bytes = field
                .bytes()
                .await
                .map_err(|e| ApiError::new(e.status(), "BAD_MULTIPART", e.body_text()))?;
            file_bytes = Some(bytes.to_vec());
        }
    }
    let file_bytes = file_bytes.ok_or_else(|| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "MISSING_FILE_FIELD",
            "multipart body must carry a \"file\" field",
        )
    })?;

    let file = dcv_core::parse_file(&file_bytes).map_err(|e| {
        ApiError::new(StatusCode::BAD_REQUEST, "PARSE_FAILURE", e.to_string())
    })?;
    let mut data = file.data;
    if state.server_deident {
        let mut uids = UidMap::new();
        let mut notices = Vec::new();
        data = deidentify_with(&data, &DeidentProfile::standard(), &mut uids, &mut notices);
        data = strip_pixel_data(&data);
    }

    let sop_class_uid = data
        .string_value(dcv_core::tags::SOP_CLASS_UID)
        .ok()
        .flatten()
        .filter(|uid| !uid.is_empty())
        .ok_or_else(|| {
            ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "UNKNOWN_SOP_CLASS",
                "file carries no SOPClassUID (0008,0016)",
            )
        })?;
    let iod = state.registry.resolve_iod(&sop_class_uid).ok_or_else(|| {
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "UNKNOWN_SOP_CLASS",
            format!("no IOD description is mapped to SOP class {sop_class_uid}"),
        )
    })?;

    let modules = iod
        .includes
        .iter()
        .map(|include| ModuleEntry {
            name: include.module_name.clone(),
            ie: include.ie.clone(),
            usage: include.usage.code(),
        })
        .collect();

    let id = crate::new_validation_id();
    state.sessions.insert(Session::new(
        id.clone(),
        data,
        sop_class_uid.clone(),
        iod.name.clone(),
    ));

    let body = serde_json::to_string(&ConfigureResponse {
        validation_id: id.clone(),
        sop_class_uid,
        iod_name: iod.name.clone(),
        modules,
        options: ConfigureOptions {
            use_defaults_available: true,
        },
    })
    .expect("configure response serializes");
    let mut response = json_response(body);
    response.extensions_mut().insert(session_tag(&id));
    Ok(response)
}

#[derive(Deserialize)]
struct ValidateBody {
    #[serde(rename = "validationId")]
    validation_id: String,
    modules: ModulesField,
    #[serde(rename = "useDefaults", default)]
    use_defaults: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ModulesField {
    Keyword(String),
    List(Vec<String>),
}

#[derive(Serialize)]
struct QuestionsResponse {
    questions: Vec<QuestionEntry>,
}

#[derive(Serialize)]
struct QuestionEntry {
    id: String,
    question: String,
    default: bool,
}

fn expired_or_unknown(found_expired: bool) -> ApiError {
    if found_expired {
        ApiError::new(
            StatusCode::GONE,
            "SESSION_EXPIRED",
            "the validation session has expired",
        )
    } else {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "UNKNOWN_SESSION",
            "no session with that validation id",
        )
    }
}

async fn validate_endpoint(
    State(state): State<AppState>,
    Json(body): Json<ValidateBody>,
) -> Result<Response, ApiError> {
    let session = state
        .sessions
        .get(&body.validation_id)
        .map_err(expired_or_unknown)?;
    let mut session = session.lock().await;

    if session.state != SessionState::AwaitingSelection {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "WRONG_STATE",
            "the session already received its module selection",
        ));
    }

    let iod = state
        .registry
        .iod(&session.iod_name)
        .expect("session IOD stays resolvable");
    let selection = match &body.modules {
        ModulesField::Keyword(word) if word == "all" => Selection::All,
        ModulesField::Keyword(word) => {
            return Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                "UNKNOWN_MODULE_NAME",
                format!("modules must be \"all\" or a list of names, got {word:?}"),
            ));
        }
        ModulesField::List(names) => {
            for name in names {
                if !iod.includes.iter().any(|i| &i.module_name == name) {
                    return Err(ApiError::new(
                        StatusCode::BAD_REQUEST,
                        "UNKNOWN_MODULE_NAME",
                        format!("module {name:?} is not part of IOD {}", iod.name),
                    ));
                }
            }
            Selection::from_names(names.clone())
        }
    };

    let mut response = if body.use_defaults {
        let report = validate(
            &session.data,
            iod,
            &state.registry,
            &selection,
            &Answers::new(),
        )
        .map_err(internal)?;
        let json = report_to_json(&report, &session.id);
        session.selection = Some(selection);
        session.report_json = Some(json.clone());
        session.state = SessionState::Completed;
        json_response(json)
    } else {
        let questions = collect_questions(iod, &state.registry, &selection).map_err(internal)?;
        session.selection = Some(selection);
        session.state = SessionState::AwaitingAnswers;
        let body = serde_json::to_string(&QuestionsResponse {
            questions: questions
                .into_iter()
                .map(|q| QuestionEntry {
                    id: q.id,
                    question: q.question,
                    default: q.default,
                })
                .collect(),
        })
        .expect("questions response serializes");
        json_response(body)
    };
    response.extensions_mut().insert(session_tag(&session.id));
    Ok(response)
}

#[derive(Deserialize)]
struct ResultBody {
    #[serde(rename = "validationId")]
    validation_id: String,
    #[serde(default)]
    answers: Option<BTreeMap<String, bool>>,
}

fn internal(err: impl std::fmt::Display) -> ApiError {
    ApiError::new(
        StatusCode::INTERNAL_SERVER_ERROR,
        "INTERNAL",
        err.to_string(),
    )
}

async fn result_endpoint(
    State(state): State<AppState>,
    Json(body): Json<ResultBody>,
) -> Result<Response, ApiError> {
    let session = state
        .sessions
        .get(&body.validation_id)
        .map_err(expired_or_unknown)?;
    let mut session = session.lock().await;

    match session.state {
        SessionState::AwaitingSelection => Err(ApiError::new(
            StatusCode::CONFLICT,
            "WRONG_STATE",
            "select modules via /validate before requesting the result",
        )),
        SessionState::Completed => {
            let json = session
                .report_json
                .clone()
                .expect("completed sessions store their report");
            let mut response = json_response(json);
            response.extensions_mut().insert(session_tag(&session.id));
            Ok(response)
        }
        SessionState::AwaitingAnswers => {
            let iod = state
                .registry
                .iod(&session.iod_name)
                .expect("session IOD stays resolvable");
            let selection = session
                .selection
                .clone()
                .expect("awaiting-answers sessions store their selection");
            let questions =
                collect_questions(iod, &state.registry, &selection).map_err(internal)?;
            let mut answers = Answers::new();
            if let Some(supplied) = &body.answers {
                for (id, value) in supplied {
                    if !questions.iter().any(|q| &q.id == id) {
                        return Err(ApiError::new(
                            StatusCode::BAD_REQUEST,
                            "UNKNOWN_ANSWER_ID",
                            format!("answer id {id:?} does not match any question"),
                        ));
                    }
                    answers.set(id.clone(), *value);
                }
            }
            let report = validate(&session.data, iod, &state.registry, &selection, &answers)
                .map_err(internal)?;
            let json = report_to_json(&report, &session.id);
            session.report_json = Some(json.clone());
            session.state = SessionState::Completed;
            let mut response = json_response(json);
            response.extensions_mut().insert(session_tag(&session.id));
            Ok(response)
        }
    }
}
