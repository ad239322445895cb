package android.telephony;

import android.app.PendingIntent;
import java.util.ArrayList;

/** Manages SMS operations such as sending data, text, and pdu SMS messages. */
public final class SmsManager {

    /**
     * Send a text based SMS.
     *
     * @param destinationAddress the address to send the message to
     * @param text the body of the message to send
     */
    public void sendTextMessage(String destinationAddress, String scAddress, String text,
            PendingIntent sentIntent, PendingIntent deliveryIntent) {
        sendTextMessageInternal(destinationAddress, scAddress, text, sentIntent, deliveryIntent, true);
    }

    /**
     * Divide a message text into several fragments, none bigger than the
     * maximum SMS message size.
     */
    public ArrayList<String> divideMessage(String text) {
        ArrayList<String> parts = new ArrayList<String>();
        for (int i = 0; i < text.length(); i += 160) {
            parts.add(text.substring(i, Math.min(text.length(), i + 160)));
        }
        return parts;
    }

    private void sendTextMessageInternal(String destinationAddress, String scAddress, String text,
            PendingIntent sentIntent, PendingIntent deliveryIntent, boolean persist) {
        // binder call elided
    }

    /** Get the SmsManager associated with the default subscription id. */
    public static SmsManager getDefault() {
        return new SmsManager();
    }
}
