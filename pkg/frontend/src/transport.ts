// Line-oriented transports for the session protocol. The browser speaks
// WebSocket (one protocol line per text frame); tests and tooling under
// node speak raw TCP NDJSON. Message content is identical either way.

export interface LineTransport {
  send(line: string): void;
  onLine(handler: (line: string) => void): void;
  onClose(handler: () => void): void;
  close(): void;
}

export class WebSocketTransport implements LineTransport {
  private lineHandler: ((line: string) => void) | null = null;
  private closeHandler: (() => void) | null = null;

  constructor(private socket: WebSocket) {
    socket.onmessage = (ev) => {
      if (typeof ev.data === "string" && this.lineHandler) {
        this.lineHandler(ev.data);
      }
    };
    socket.onclose = () => this.closeHandler?.();
    socket.onerror = () => this.closeHandler?.();
  }

  static connect(url: string): Promise<WebSocketTransport> {
    return new Promise((resolve, reject) => {
      const ws = new WebSocket(url);
      ws.onopen = () => resolve(new WebSocketTransport(ws));
      ws.onerror = () => reject(new Error(`cannot reach ${url}`));
    });
  }

  send(line: string): void {
    this.socket.send(line);
  }

  onLine(handler: (line: string) => void): void {
    this.lineHandler = handler;
  }

  onClose(handler: () => void): void {
    this.closeHandler = handler;
  }

  close(): void {
    this.socket.close();
  }
}

/** Raw TCP NDJSON transport (node only; used by the e2e tests). */
export class TcpLineTransport implements LineTransport {
  private lineHandler: ((line: string) => void) | null = null;
  private closeHandler: (() => void) | null = null;
  private buffer = "";

  private constructor(private socket: import("node:net").Socket) {
    socket.on("data", (chunk: Buffer) => {
      this.buffer += chunk.toString("utf-8");
      let idx: number;
      while ((idx = this.buffer.indexOf("\n")) >= 0) {
        const line = this.buffer.slice(0, idx);
        this.buffer = this.buffer.slice(idx + 1);
        if (line.trim() && this.lineHandler) this.lineHandler(line);
      }
    });
    socket.on("close", () => this.closeHandler?.());
    socket.on("error", () => this.closeHandler?.());
  }

  static async connect(host: string, port: number): Promise<TcpLineTransport> {
    const net = await import("node:net");
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port }, () =>
        resolve(new TcpLineTransport(socket)),
      );
      socket.on("error", reject);
    });
  }

  send(line: string): void {
    this.socket.write(line + "\n");
  }

  onLine(handler: (line: string) => void): void {
    this.lineHandler = handler;
  }

  onClose(handler: () => void): void {
    this.closeHandler = handler;
  }

  close(): void {
    this.socket.end();
  }
}
