use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::extract::ws::{Message, Utf8Bytes, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::{Html, Response};
use axum::routing::get;
use axum::Router;
use log::{debug, error, info, warn};
use tokio::sync::broadcast;
use tower_http::services::ServeDir;
use treeot_core::json_model::{edit_to_op, json_to_tree, DocTreeValue, EditIntent};
use treeot_core::sync::protocol::{ClientFrame, ServerFrame};
use treeot_core::sync::{log_replay, OpEnvelope, OpLog, Revision, ServerState, SyncError};
use treeot_core::SiteId;

use crate::CliError;

const PLACEHOLDER_UI: &str = include_str!("../ui/index.html");
const CHANNEL_CAPACITY: usize = 4096;

pub struct ServeOpts {
    pub addr: SocketAddr,
    pub docs: Vec<PathBuf>,
    pub log: Option<PathBuf>,
    pub ui: Option<PathBuf>,
}

struct DocState {
    server: ServerState<DocTreeValue>,
    log: Option<OpLog>,
}

/// One document: its state, mutated under the lock, and the fan-out of
/// committed operations. Frames are sent on the channel while the lock is
/// held, so every subscriber sees them in revision order.
struct DocHub {
    id: String,
    state: Mutex<DocState>,
    tx: broadcast::Sender<Utf8Bytes>,
}

type Docs = Arc<BTreeMap<String, Arc<DocHub>>>;

fn encode(frame: &ServerFrame<DocTreeValue>) -> Utf8Bytes {
    serde_json::to_string(frame).expect("frames encode").into()
}

fn error_frame(code: &str, msg: impl Into<String>) -> ServerFrame<DocTreeValue> {
    ServerFrame::error(code, msg)
}

impl DocHub {
    fn load(id: String, doc: &Path, log: Option<&Path>) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(doc).map_err(|source| CliError::Io { path: doc.to_owned(), source })?;
        let json: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CliError::Startup(format!("{}: {e}", doc.display())))?;
        let initial = json_to_tree(&json);
        let (server, log) = match log {
            Some(path) => {
                let server = log_replay(path, initial).map_err(|e| CliError::Startup(e.to_string()))?;
                let log = OpLog::open(path).map_err(|e| CliError::Startup(e.to_string()))?;
                info!("{id}: replayed {} from {} to revision {}", doc.display(), path.display(), server.head());
                (server, Some(log))
            }
            None => (ServerState::new(initial), None),
        };
        let (tx, _) = broadcast::channel(CHANNEL_CAPACITY);
        Ok(DocHub { id, state: Mutex::new(DocState { server, log }), tx })
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, DocState> {
        self.state.lock().unwrap_or_else(|p| p.into_inner())
    }

    /// The snapshot for a joining site and a subscription starting right
    /// after it.
    fn join(&self, site: SiteId) -> (Utf8Bytes, broadcast::Receiver<Utf8Bytes>) {
        let st = self.lock();
        let frame = ServerFrame::Snapshot {
            rev: st.server.head(),
            doc: st.server.doc().clone(),
            next_seq: st.server.next_seq(site),
        };
        (encode(&frame), self.tx.subscribe())
    }

    fn commit(&self, st: &mut DocState, env: &OpEnvelope<DocTreeValue>) -> Result<(), ServerFrame<DocTreeValue>> {
        let b = st.server.ingest(env).map_err(|e| ServerFrame::from(&e))?;
        if let Some(log) = st.log.as_mut() {
            if let Err(e) = log.append(env) {
                error!("{}: {e}", self.id);
                return Err(error_frame("storage", e.to_string()));
            }
        }
        debug!("{}: committed revision {} from {}", self.id, b.rev, b.site);
        // No subscribers is fine.
        let _ = self.tx.send(encode(&b.into()));
        Ok(())
    }

    fn handle(&self, site: SiteId, frame: ClientFrame<DocTreeValue>) -> Result<(), ServerFrame<DocTreeValue>> {
        match frame {
            ClientFrame::Hello { .. } => Err(error_frame("already-joined", "hello was already received")),
            ClientFrame::Op { site: from, seq, parent_rev, op } => {
                if from != site {
                    return Err(error_frame("wrong-site", format!("connection joined as {site}, op claims {from}")));
                }
                let env = OpEnvelope { site, seq, parent_revision: parent_rev, op };
                self.commit(&mut self.lock(), &env)
            }
            ClientFrame::Edit { parent_rev, intent } => self.edit(site, parent_rev, &intent),
        }
    }

    fn edit(&self, site: SiteId, parent_rev: Revision, intent: &EditIntent) -> Result<(), ServerFrame<DocTreeValue>> {
        let mut st = self.lock();
        let head = st.server.head();
        if parent_rev > head {
            return Err((&SyncError::RevisionGap { expected: head, got: parent_rev }).into());
        }
        let ops = edit_to_op(st.server.doc(), intent).map_err(|e| error_frame("invalid-edit", e.to_string()))?;
        for op in ops {
            let env = OpEnvelope { site, seq: st.server.next_seq(site), parent_revision: st.server.head(), op };
            self.commit(&mut st, &env)?;
        }
        Ok(())
    }
}

fn load_docs(opts: &ServeOpts) -> Result<Docs, CliError> {
    let mut docs = BTreeMap::new();
    for path in &opts.docs {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| CliError::Usage(format!("{}: no usable file name", path.display())))?
            .to_owned();
        if docs.contains_key(&id) {
            return Err(CliError::Usage(format!("two documents with id {id:?}")));
        }
        let log = opts.log.as_ref().map(|l| {
            if opts.docs.len() == 1 {
                l.clone()
            } else {
                PathBuf::from(format!("{}.{id}", l.display()))
            }
        });
        let hub = DocHub::load(id.clone(), path, log.as_deref())?;
        docs.insert(id, Arc::new(hub));
    }
    Ok(Arc::new(docs))
}

fn router(docs: Docs, ui: Option<&Path>) -> Router {
    let app = Router::new().route("/ws", get(ws_handler)).with_state(docs);
    match ui {
        Some(dir) => app.nest_service("/ui", ServeDir::new(dir)),
        None => app.route("/ui", get(placeholder)).route("/ui/", get(placeholder)),
    }
}

async fn placeholder() -> Html<&'static str> {
    Html(PLACEHOLDER_UI)
}

async fn ws_handler(ws: WebSocketUpgrade, State(docs): State<Docs>) -> Response {
    ws.on_upgrade(move |socket| connection(socket, docs))
}

async fn send(socket: &mut WebSocket, frame: Utf8Bytes) -> bool {
    socket.send(Message::Text(frame)).await.is_ok()
}

async fn next_frame(socket: &mut WebSocket) -> Option<Result<ClientFrame<DocTreeValue>, String>> {
    loop {
        match socket.recv().await? {
            Ok(Message::Text(text)) => return Some(serde_json::from_str(&text).map_err(|e| e.to_string())),
            Ok(Message::Close(_)) | Err(_) => return None,
            Ok(_) => {}
        }
    }
}

async fn connection(mut socket: WebSocket, docs: Docs) {
    let (hub, site, mut rx) = loop {
        let reply = match next_frame(&mut socket).await {
            None => return,
            Some(Ok(ClientFrame::Hello { doc, site })) => match docs.get(&doc) {
                Some(hub) => {
                    let (snapshot, rx) = hub.join(site);
                    if !send(&mut socket, snapshot).await {
                        return;
                    }
                    info!("{doc}: {site} joined");
                    break (hub.clone(), site, rx);
                }
                None => error_frame("unknown-doc", format!("no document {doc:?}")),
            },
            Some(Ok(_)) => error_frame("no-hello", "send hello first"),
            Some(Err(e)) => error_frame("bad-frame", e),
        };
        if !send(&mut socket, encode(&reply)).await {
            return;
        }
    };
    loop {
        tokio::select! {
            incoming = next_frame(&mut socket) => {
                let result = match incoming {
                    None => break,
                    Some(Ok(frame)) => hub.handle(site, frame),
                    Some(Err(e)) => Err(error_frame("bad-frame", e)),
                };
                if let Err(frame) = result {
                    debug!("{}: {site}: {:?}", hub.id, frame);
                    if !send(&mut socket, encode(&frame)).await {
                        break;
                    }
                }
            }
            committed = rx.recv() => match committed {
                Ok(frame) => {
                    if !send(&mut socket, frame).await {
                        break;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(n)) => {
                    warn!("{}: {site} fell {n} frames behind; closing", hub.id);
                    let _ = send(&mut socket, encode(&error_frame("lagged", "too far behind; rejoin for a fresh snapshot"))).await;
                    break;
                }
                Err(broadcast::error::RecvError::Closed) => break,
            }
        }
    }
    info!("{}: {site} left", hub.id);
}

pub fn run(opts: ServeOpts) -> Result<(), CliError> {
    let docs = load_docs(&opts)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Startup(e.to_string()))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(opts.addr)
            .await
            .map_err(|e| CliError::Startup(format!("cannot bind {}: {e}", opts.addr)))?;
        let local = listener.local_addr().map_err(|e| CliError::Startup(e.to_string()))?;
        // Tests and scripts read the bound address from this line.
        println!("listening on {local}");
        info!("serving {} on ws://{local}/ws", docs.keys().cloned().collect::<Vec<_>>().join(", "));
        axum::serve(listener, router(docs, opts.ui.as_deref()))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| CliError::Startup(e.to_string()))
    })
}
