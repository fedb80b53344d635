/**
 * Request sequencing: at most one response is applied per pane, and a
 * response is dropped when a newer request has been issued since.
 */

export class RequestSequencer {
  private counter = 0;
  private applied = 0;

  /** Returns a ticket for a request about to be issued. */
  next(): number {
    this.counter += 1;
    return this.counter;
  }

  /** True when the response for this ticket is still current. */
  accept(ticket: number): boolean {
    if (ticket < this.counter || ticket <= this.applied) return false;
    this.applied = ticket;
    return true;
  }

  /** Ticket of the most recently issued request. */
  current(): number {
    return this.counter;
  }
}
