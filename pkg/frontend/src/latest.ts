/**
 * Token counter for latest-wins request handling: a response is applied
 * only if its token is still the newest one issued.
 */
export class LatestWins {
  private seq = 0;

  begin(): number {
    return ++this.seq;
  }

  isCurrent(token: number): boolean {
    return token === this.seq;
  }
}
